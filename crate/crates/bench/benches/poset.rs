use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tensorfree::poset::{covering_switches, interval, minimal_map, SwitchPosetView};
use tensorfree::CombMap;

fn queries(c: &mut Criterion) {
    let ring = CombMap::cycle(6).unwrap();
    let bottom = minimal_map(&ring).unwrap();
    let quartic = CombMap::melon(4, None).unwrap();
    c.bench_function("covering_switches/cycle6", |b| b.iter(|| covering_switches(black_box(&ring)).unwrap()));
    c.bench_function("minimal_map/cycle6", |b| b.iter(|| minimal_map(black_box(&ring)).unwrap()));
    c.bench_function("minimal_map/melon4", |b| b.iter(|| minimal_map(black_box(&quartic)).unwrap()));
    c.bench_function("interval/cycle6", |b| b.iter(|| interval(black_box(&bottom), &ring).unwrap()));
    let view = SwitchPosetView::new(ring.pi().clone());
    view.interval(&bottom, &ring).unwrap();
    c.bench_function("interval/cycle6/cached", |b| b.iter(|| view.interval(black_box(&bottom), &ring).unwrap()));
}

criterion_group!(benches, queries);
criterion_main!(benches);

mod common;

use std::collections::HashMap;

use num_rational::BigRational;
use tensorfree::combmap::{CombMap, MapKind};
use tensorfree::distribution::AbstractDistribution;
use tensorfree::moments::{
    exact_gaussian_moment, exact_gaussian_moment_rational, limit_moment_gaussian, monte_carlo, weingarten_table,
    GaussianEnsemble, SampleStats,
};
use tensorfree::randgen::{haar_orthogonal, purpose, EnsembleSpec, EntryLaw, GoteSampler, SeedStream, VarianceProfile};
use tensorfree::scalar::rational;
use tensorfree::tensoreval::eval_closed;
use tensorfree::{ColoredMap, Result, Scalar};

fn sampler(p: usize, n: usize, law: EntryLaw, seed: u64) -> GoteSampler {
    GoteSampler::new(EnsembleSpec { p, n, law, seed, profile: VarianceProfile::Standard }).unwrap()
}

fn ensemble() -> GaussianEnsemble {
    GaussianEnsemble::new(["w"], VarianceProfile::Standard)
}

fn melon(p: usize) -> ColoredMap {
    ColoredMap::uniform(CombMap::melon(p, None).unwrap(), "w").unwrap()
}

fn dumbbell() -> ColoredMap {
    let m = CombMap::from_cycles(&[vec![1, 2, 3], vec![4, 5, 6]], &[vec![1, 2], vec![3, 4], vec![5, 6]], MapKind::Map);
    ColoredMap::uniform(m.unwrap(), "w").unwrap()
}

fn sample(maps: &[ColoredMap], s: &GoteSampler, samples: u64) -> Result<Vec<SampleStats>> {
    monte_carlo(samples, maps.len(), |i| {
        let t = HashMap::from([("w".to_string(), s.sample(i))]);
        maps.iter().map(|m| eval_closed(m, &t)).collect()
    })
}

fn exact(cm: &ColoredMap, n: usize) -> f64 {
    exact_gaussian_moment(cm, n, &ensemble(), &HashMap::new()).unwrap().value
}

#[test]
fn same_seed_gives_identical_tensors() {
    for law in [EntryLaw::Gaussian, EntryLaw::Rademacher, EntryLaw::Uniform] {
        let a = sampler(3, 4, law, 11);
        let b = sampler(3, 4, law, 11);
        for i in [0, 1, 17] {
            let (x, y) = (a.sample(i), b.sample(i));
            assert!(x.data().iter().zip(y.data()).all(|(u, v)| u.to_bits() == v.to_bits()));
        }
        assert_ne!(a.sample(0).data(), a.sample(1).data());
        assert_ne!(a.sample(0).data(), sampler(3, 4, law, 12).sample(0).data());
    }
}

#[test]
fn distinct_indices_are_uncorrelated() {
    let s = sampler(2, 3, EntryLaw::Gaussian, 5);
    let st = monte_carlo(40_000, 2, |i| {
        let (x, y) = (s.sample(2 * i), s.sample(2 * i + 1));
        Ok(vec![x.get(&[0, 1]) * y.get(&[0, 1]), x.get(&[0, 0]) * y.get(&[2, 2])])
    })
    .unwrap();
    for c in st {
        assert!(c.mean.abs() <= 4.0 * c.stderr, "{c:?}");
    }
}

#[test]
fn rademacher_orbits_have_the_exact_variance() {
    let s = sampler(3, 3, EntryLaw::Rademacher, 2);
    let t = s.table();
    let stream = SeedStream::new(2);
    for i in 0..20 {
        let x = s.draw_orbits(&mut stream.rng(purpose::TENSOR, i));
        for (o, v) in x.iter().enumerate() {
            let var = t.variance(o, VarianceProfile::Standard);
            assert!((v * v - var).abs() <= 1e-14 * var);
        }
    }
}

#[test]
fn haar_entry_moments() {
    for n in [3usize, 6] {
        let stream = SeedStream::new(n as u64);
        let st = monte_carlo(60_000, 2, |i| {
            let u = haar_orthogonal(n, &mut stream.rng(purpose::HAAR, i));
            Ok(vec![u.get(&[0, 0]).powi(2), u.get(&[1, 2]).powi(4)])
        })
        .unwrap();
        let nf = n as f64;
        assert!((st[0].mean - 1.0 / nf).abs() <= 4.0 * st[0].stderr, "{st:?}");
        assert!((st[1].mean - 3.0 / (nf * (nf + 2.0))).abs() <= 4.0 * st[1].stderr, "{st:?}");
    }
}

#[test]
fn exact_moments_agree_with_sampling() {
    let maps = [melon(3), dumbbell(), melon(2).disjoint_union(&melon(2)).unwrap()];
    for n in [2usize, 3] {
        let st = sample(&maps[..2], &sampler(3, n, EntryLaw::Gaussian, 40 + n as u64), 40_000).unwrap();
        for (m, s) in maps[..2].iter().zip(&st) {
            let e = exact(m, n);
            assert!((s.mean - e).abs() <= 4.0 * s.stderr, "N={n}: {} vs {e}", s.mean);
        }
        let st = sample(&maps[2..], &sampler(2, n, EntryLaw::Gaussian, 50 + n as u64), 40_000).unwrap();
        let e = exact(&maps[2], n);
        assert!((st[0].mean - e).abs() <= 4.0 * st[0].stderr, "N={n}: {} vs {e}", st[0].mean);
    }
}

/// Least-squares slope of log|y| against log x.
fn log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.abs().ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn finite_n_corrections_are_order_one_over_n() {
    let base = AbstractDistribution::<BigRational>::new();
    for m in [melon(3), dumbbell()] {
        let limit = limit_moment_gaussian(&m, &ensemble(), &base).unwrap();
        let points: Vec<(f64, f64)> = [2usize, 3, 4, 6]
            .iter()
            .map(|&n| {
                let e = exact_gaussian_moment_rational(&m, n, &ensemble(), &HashMap::new()).unwrap();
                (n as f64, (e - &limit).to_f64())
            })
            .collect();
        let slope = log_slope(&points);
        assert!((-1.6..=-0.6).contains(&slope), "slope {slope} from {points:?}");
    }
    // The dumbbell is 1/N + 2/N² exactly.
    for n in [2i64, 3, 4] {
        let e = exact_gaussian_moment_rational(&dumbbell(), n as usize, &ensemble(), &HashMap::new()).unwrap();
        assert_eq!(e, rational(n + 2, n * n));
    }
}

#[test]
fn weingarten_signs_alternate_with_length() {
    for (k, n) in [(4, 6), (6, 10)] {
        let t = weingarten_table(k, n).unwrap();
        for i in 0..t.len() {
            for j in 0..t.len() {
                let even = t.length(i, j).is_multiple_of(2);
                assert_eq!(t.value(i, j) > 0.0, even, "k={k} N={n} ({i},{j})");
            }
        }
    }
}

/// The variance bound is O(1/N); the observed decay is faster (about N^-p
/// here), so only the lower end of the ratio is asserted.
#[test]
fn sample_variance_decays_at_least_like_one_over_n() {
    let cases = [(3, vec![melon(3), dumbbell()]), (2, vec![melon(2)])];
    for (p, maps) in cases {
        let var: Vec<Vec<f64>> = [6usize, 12]
            .iter()
            .map(|&n| {
                let st = sample(&maps, &sampler(p, n, EntryLaw::Gaussian, 70), 4_000).unwrap();
                st.iter().map(|s| s.variance).collect()
            })
            .collect();
        for (a, b) in var[0].iter().zip(&var[1]) {
            assert!(a / b >= 1.4, "p={p}: variances {a} at N=6, {b} at N=12");
        }
    }
}

#[test]
fn disjoint_unions_factorize_as_n_grows() {
    let (f, ff) = (melon(2), melon(2).disjoint_union(&melon(2)).unwrap());
    let gaps: Vec<BigRational> = [1usize, 2, 3, 4]
        .iter()
        .map(|&n| {
            let e = |m: &ColoredMap| exact_gaussian_moment_rational(m, n, &ensemble(), &HashMap::new()).unwrap();
            let g = e(&ff) - e(&f) * e(&f);
            if g < BigRational::from_integer(0.into()) { -g } else { g }
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

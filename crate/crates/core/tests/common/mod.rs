#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensorfree::combmap::random_map;
use tensorfree::tensoreval::DenseTensor;
use tensorfree::{ColoredMap, CombMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random degrees in `1..=max_degree`, at least `min_vertices` of them,
/// with a total of the given parity.
pub fn random_degrees(rng: &mut ChaCha8Rng, min_vertices: usize, max_vertices: usize, max_degree: usize, even_total: bool) -> Vec<usize> {
    loop {
        let d: Vec<usize> = (0..rng.random_range(min_vertices..=max_vertices))
            .map(|_| rng.random_range(1..=max_degree))
            .collect();
        if (d.iter().sum::<usize>() % 2 == 0) == even_total {
            return d;
        }
    }
}

pub fn random_closed(rng: &mut ChaCha8Rng, max_vertices: usize, max_degree: usize) -> CombMap {
    let d = random_degrees(rng, 1, max_vertices, max_degree, true);
    random_map(rng, &d, 0).unwrap()
}

/// One color per degree, named `d<degree>`.
pub fn by_degree(m: CombMap) -> ColoredMap {
    let colors = m.degrees().iter().map(|d| format!("d{d}")).collect();
    ColoredMap::new(m, colors).unwrap()
}

pub fn random_tensor(rng: &mut ChaCha8Rng, p: usize, n: usize) -> DenseTensor {
    DenseTensor::from_fn(p, n, |_| rng.random_range(-1.0..1.0)).unwrap()
}

/// Entries in -3..=3 keep every sum of products exact in f64.
pub fn integer_tensor(rng: &mut ChaCha8Rng, p: usize, n: usize) -> DenseTensor {
    DenseTensor::from_fn(p, n, |_| f64::from(rng.random_range(-3i8..=3))).unwrap()
}

pub fn degree_tensors(
    rng: &mut ChaCha8Rng,
    max_degree: usize,
    n: usize,
    make: fn(&mut ChaCha8Rng, usize, usize) -> DenseTensor,
) -> HashMap<String, DenseTensor> {
    (1..=max_degree).map(|d| (format!("d{d}"), make(rng, d, n))).collect()
}

pub fn abs_tensor(t: &DenseTensor) -> DenseTensor {
    DenseTensor::new(t.order(), t.dim(), t.data().iter().map(|x| x.abs()).collect()).unwrap()
}

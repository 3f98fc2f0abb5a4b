//! Exact Gaussian moments by summing over every index assignment.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{GaussianEnsemble, MomentEstimate};
use crate::combmap::ColoredMap;
use crate::error::{Error, Result};
use crate::randgen::{EntryLaw, VarianceProfile};
use crate::scalar::{rational_from_f64, Scalar};
use crate::tensoreval::DenseTensor;

const MAX_ASSIGNMENTS: u128 = 1 << 22;

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Variance of an entry whose sorted index tuple is `idx`.
fn orbit_variance(idx: &[usize], profile: VarianceProfile) -> BigRational {
    let mut num = BigInt::one();
    let mut run = 1;
    for w in idx.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            num *= factorial(run);
            run = 1;
        }
    }
    num *= factorial(run);
    match profile {
        VarianceProfile::Standard => BigRational::new(num, factorial(idx.len() - 1)),
        VarianceProfile::Factorial => BigRational::from_integer(num),
    }
}

fn double_factorial_odd(r: usize) -> BigInt {
    // (r - 1)!! for even r.
    (1..r).step_by(2).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Exact E_N[m] with the colors of `ensemble` drawn from independent
/// Gaussian ensembles and every other color bound to a tensor of `fixed`.
pub fn exact_gaussian_moment_rational(
    cm: &ColoredMap,
    n: usize,
    ensemble: &GaussianEnsemble,
    fixed: &HashMap<String, DenseTensor>,
) -> Result<BigRational> {
    let m = cm.map();
    if !m.is_closed() {
        return Err(Error::Precondition("moments are defined on closed maps".into()));
    }
    if ensemble.law != EntryLaw::Gaussian {
        return Err(Error::Unsupported("the exact oracle only covers Gaussian entries".into()));
    }
    if n == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    if m.edge_count() > 14 {
        return Err(Error::Capacity(format!("{} directed edges (at most 14)", m.edge_count())));
    }
    let edges = m.edges();
    let assignments = (n as u128).checked_pow(edges.len() as u32).unwrap_or(u128::MAX);
    if assignments > MAX_ASSIGNMENTS {
        return Err(Error::Capacity(format!("{assignments} index assignments")));
    }

    let mut edge_of = vec![0; m.edge_count()];
    for (k, e) in edges.iter().enumerate() {
        for &h in e {
            edge_of[h] = k;
        }
    }
    let mut gaussian: Vec<(usize, &[usize])> = Vec::new();
    let mut deterministic: Vec<(&[usize], &DenseTensor, Vec<BigRational>)> = Vec::new();
    let mut names: Vec<&str> = Vec::new();
    let mut scale_exp = 0;
    for v in 0..m.vertex_count() {
        let c = cm.color(v);
        if ensemble.colors.contains(c) {
            let id = names.iter().position(|x| *x == c).unwrap_or_else(|| {
                names.push(c);
                names.len() - 1
            });
            gaussian.push((id, m.legs(v)));
            scale_exp += m.degree(v) - 1;
        } else {
            let t = fixed.get(c).ok_or_else(|| Error::Missing(format!("tensor for color `{c}`")))?;
            if t.order() != m.degree(v) || t.dim() != n {
                return Err(Error::Arity(format!("tensor for `{c}` has the wrong shape")));
            }
            let exact = t.data().iter().map(|&x| rational_from_f64(x)).collect();
            deterministic.push((m.legs(v), t, exact));
        }
    }
    if scale_exp % 2 == 1 {
        return Ok(<BigRational as Zero>::zero());
    }

    let mut idx = vec![0usize; edges.len()];
    let mut total = <BigRational as Zero>::zero();
    let mut keys: Vec<(usize, Vec<usize>)> = Vec::with_capacity(gaussian.len());
    let flat = |legs: &[usize], idx: &[usize]| legs.iter().fold(0, |acc, &h| acc * n + idx[edge_of[h]]);
    'assign: loop {
        let mut det = <BigRational as One>::one();
        for (legs, t, exact) in &deterministic {
            let o = flat(legs, &idx);
            if t.data()[o] == 0.0 {
                det = <BigRational as Zero>::zero();
                break;
            }
            det *= &exact[o];
        }
        if !det.is_zero() {
            keys.clear();
            for &(id, legs) in &gaussian {
                let mut tuple: Vec<usize> = legs.iter().map(|&h| idx[edge_of[h]]).collect();
                tuple.sort_unstable();
                keys.push((id, tuple));
            }
            keys.sort_unstable();
            let mut weight = det;
            let mut i = 0;
            while i < keys.len() {
                let mut j = i + 1;
                while j < keys.len() && keys[j] == keys[i] {
                    j += 1;
                }
                let r = j - i;
                if r % 2 == 1 {
                    weight = <BigRational as Zero>::zero();
                    break;
                }
                let var = orbit_variance(&keys[i].1, ensemble.profile);
                weight *= BigRational::from_integer(double_factorial_odd(r));
                for _ in 0..r / 2 {
                    weight *= &var;
                }
                i = j;
            }
            total += weight;
        }
        for d in idx.iter_mut() {
            *d += 1;
            if *d < n {
                continue 'assign;
            }
            *d = 0;
        }
        break;
    }
    let gamma = m.gamma() as i32;
    Ok(total * BigRational::int_pow(n as i64, -(scale_exp as i32) / 2 - gamma))
}

/// [`exact_gaussian_moment_rational`] as a [`MomentEstimate`].
pub fn exact_gaussian_moment(
    cm: &ColoredMap,
    n: usize,
    ensemble: &GaussianEnsemble,
    fixed: &HashMap<String, DenseTensor>,
) -> Result<MomentEstimate> {
    let v = exact_gaussian_moment_rational(cm, n, ensemble, fixed)?;
    Ok(MomentEstimate::exact(cm, Some(n), Scalar::to_f64(&v)))
}

//! Free central limit theorem for a single centered variable.

use std::collections::HashMap;

use super::cumulant::{colored, cumulant_transform, interval_below};
use super::AbstractDistribution;
use crate::combmap::{canonical_form, ColoredMap, CombMap, Permutation};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// n^{1 - v/2} as an exact scalar.
fn scaling<S: Scalar>(n: u64, v: usize) -> Result<S> {
    if v.is_multiple_of(2) {
        return Ok(S::int_pow(n as i64, 1 - (v / 2) as i32));
    }
    let r = (n as f64).sqrt().round() as u64;
    if r * r != n {
        return Err(Error::Unsupported(format!(
            "odd component size {v} needs a square number of summands, got {n}"
        )));
    }
    Ok(S::int_pow(r as i64, 2 - v as i32))
}

fn centered_cumulant<S: Scalar>(a: &AbstractDistribution<S>, comp: &ColoredMap) -> Result<S> {
    let k = cumulant_transform(a, comp)?;
    if comp.map().vertex_count() == 1 && !k.is_exact_zero() {
        return Err(Error::Precondition("the variable is not centered".into()));
    }
    Ok(k)
}

/// κ_m of s_n = n^{-1/2}(a_1 + … + a_n) for free copies of `a`, on a
/// connected map m with v vertices: n^{1 - v/2} κ_m(a).
pub fn clt_cumulant<S: Scalar>(a: &AbstractDistribution<S>, n: u64, m: &ColoredMap) -> Result<S> {
    let k = centered_cumulant(a, m)?;
    if k.is_exact_zero() {
        return Ok(k);
    }
    Ok(scaling::<S>(n, m.map().vertex_count())? * k)
}

/// Moment of s_n on a closed map, reassembled from the scaled cumulants.
pub fn clt<S: Scalar>(a: &AbstractDistribution<S>, n: u64, m: &ColoredMap) -> Result<S> {
    if n == 0 {
        return Err(Error::Precondition("at least one summand is needed".into()));
    }
    let iv = interval_below(m)?;
    let mut memo: HashMap<String, S> = HashMap::new();
    let mut acc = S::zero();
    'elements: for i in 0..iv.len() {
        let mut term = S::one();
        for comp in colored(m, &iv, i).split_components() {
            let key = canonical_form(&comp).key;
            let k = match memo.get(&key) {
                Some(k) => k.clone(),
                None => {
                    let k = clt_cumulant(a, n, &comp)?;
                    memo.insert(key, k.clone());
                    k
                }
            };
            if k.is_exact_zero() {
                continue 'elements;
            }
            term = term * k;
        }
        acc = acc + term;
    }
    Ok(acc)
}

/// Limit moment of s_n: only the melon cumulants survive.
///
/// `melon_moments` lists the values t^σ of the melons f_p^σ; melons that are
/// not listed count as zero.
pub fn clt_limit<S: Scalar>(p: usize, melon_moments: &[(Permutation, S)], m: &ColoredMap) -> Result<S> {
    let color = m
        .colors()
        .first()
        .cloned()
        .ok_or_else(|| Error::Precondition("empty query map".into()))?;
    if m.colors().iter().any(|c| *c != color) || m.map().degrees().iter().any(|&d| d != p) {
        return Err(Error::Precondition(format!("query must be {p}-regular with one color")));
    }
    let mut table: HashMap<String, S> = HashMap::new();
    for (sigma, t) in melon_moments {
        let melon = ColoredMap::uniform(CombMap::melon(p, Some(sigma))?, &color)?;
        table.insert(canonical_form(&melon).key, t.clone());
    }
    let iv = interval_below(m)?;
    let mut acc = S::zero();
    'elements: for i in 0..iv.len() {
        let mut term = S::one();
        for comp in colored(m, &iv, i).split_components() {
            match table.get(&canonical_form(&comp).key) {
                Some(t) => term = term * t.clone(),
                None => continue 'elements,
            }
        }
        acc = acc + term;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;
    use std::sync::Arc;

    fn semicircle_like() -> AbstractDistribution<BigRational> {
        // Centered, melons 1, every other connected moment 3.
        let rule = |m: &ColoredMap| -> Result<BigRational> {
            Ok(match m.map().vertex_count() {
                1 => rational(0, 1),
                2 => rational(1, 1),
                _ => rational(3, 1),
            })
        };
        AbstractDistribution::new().with_color("a", 2, "a").unwrap().with_rule(Arc::new(rule))
    }

    #[test]
    fn melon_cumulants_do_not_scale() {
        let a = semicircle_like();
        let melon = ColoredMap::uniform(CombMap::melon(2, None).unwrap(), "a").unwrap();
        for n in [1, 2, 5] {
            assert_eq!(clt_cumulant(&a, n, &melon).unwrap(), rational(1, 1));
        }
    }

    #[test]
    fn four_vertex_cumulants_scale_like_one_over_n() {
        let a = semicircle_like();
        let c4 = ColoredMap::uniform(CombMap::cycle(4).unwrap(), "a").unwrap();
        let k1 = clt_cumulant(&a, 1, &c4).unwrap();
        assert_eq!(clt_cumulant(&a, 7, &c4).unwrap(), k1 / rational(7, 1));
    }

    #[test]
    fn four_cycle_limit_is_two() {
        let c4 = ColoredMap::uniform(CombMap::cycle(4).unwrap(), "a").unwrap();
        let ts = [
            (Permutation::identity(2), rational(1, 1)),
            (Permutation::from_images(vec![1, 0]).unwrap(), rational(1, 1)),
        ];
        assert_eq!(clt_limit(2, &ts, &c4).unwrap(), rational(2, 1));
    }

    #[test]
    fn non_centered_input_is_rejected() {
        let a = AbstractDistribution::<f64>::new()
            .with_color("a", 2, "a")
            .unwrap()
            .with_rule(Arc::new(|_: &ColoredMap| Ok(1.0)));
        let c4 = ColoredMap::uniform(CombMap::cycle(4).unwrap(), "a").unwrap();
        assert!(matches!(clt(&a, 3, &c4), Err(Error::Precondition(_))));
    }
}

//! Limits for a deterministic family and a Haar-rotated family.

use std::collections::HashMap;

use crate::combmap::{canonical_form, ColoredMap};
use crate::distribution::AbstractDistribution;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn rotated_side(cm: &ColoredMap, marginals: &AbstractDistribution<impl Scalar>, rotated: &str) -> Result<Vec<bool>> {
    cm.colors()
        .iter()
        .map(|c| Ok(marginals.family(c)? == rotated))
        .collect()
}

fn rec<S: Scalar>(
    cm: &ColoredMap,
    marginals: &AbstractDistribution<S>,
    rotated: &str,
    memo: &mut HashMap<String, S>,
) -> Result<S> {
    let mut acc = S::one();
    for comp in cm.split_components() {
        let side = rotated_side(&comp, marginals, rotated)?;
        if side.iter().all(|&s| s == side[0]) {
            acc = acc * marginals.value(&comp)?;
            continue;
        }
        let canon = canonical_form(&comp);
        if let Some(v) = memo.get(&canon.key) {
            acc = acc * v.clone();
            continue;
        }
        let m = canon.map.map();
        let side = rotated_side(&canon.map, marginals, rotated)?;
        let alpha = m.alpha();
        let crossing = |h: usize| side[m.vertex_of(h)] && !side[m.vertex_of(alpha.apply(h))];
        let e = (0..m.edge_count()).find(|&h| crossing(h)).expect("a mixed component has a crossing edge");
        let ae = alpha.apply(e);
        let mut sum = S::zero();
        for f in (0..m.edge_count()).filter(|&f| f != e && crossing(f)) {
            let af = alpha.apply(f);
            for (sign, x, y) in [(1, f, af), (-1, af, f)] {
                // e meets x and α(e) meets y.
                let mut images = alpha.images().to_vec();
                images[e] = x;
                images[x] = e;
                images[ae] = y;
                images[y] = ae;
                let switched = canon.map.with_alpha(crate::Permutation::from_images(images)?)?;
                if switched.map().gamma() != 2 {
                    continue;
                }
                let v = rec(&switched, marginals, rotated, memo)?;
                sum = if sign > 0 { sum + v } else { sum - v };
            }
        }
        memo.insert(canon.key, sum.clone());
        acc = acc * sum;
    }
    Ok(acc)
}

/// Large-N limit of E_N[m] when the colors of family `rotated` are
/// conjugated by an independent Haar orthogonal matrix and all other colors
/// stay fixed. Monochromatic components are read from `marginals`.
pub fn limit_moment_rotated<S: Scalar>(
    cm: &ColoredMap,
    marginals: &AbstractDistribution<S>,
    rotated: &str,
) -> Result<S> {
    if !cm.map().is_closed() {
        return Err(Error::Precondition("limits are defined on closed maps".into()));
    }
    rec(cm, marginals, rotated, &mut HashMap::new())
}

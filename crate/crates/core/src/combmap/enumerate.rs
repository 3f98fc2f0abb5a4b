//! Exhaustive and random generation of maps with prescribed vertex degrees.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{ColoredMap, CombMap, MapKind, Permutation};
use crate::error::{Error, Result};

/// Involutions of `0..n` as pair lists; fixed points appear as `(i, i)`
/// when allowed.
pub fn involutions(n: usize, allow_fixed: bool) -> Vec<Vec<(usize, usize)>> {
    fn go(free: &mut Vec<usize>, acc: &mut Vec<(usize, usize)>, allow_fixed: bool, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some(&first) = free.first() else {
            out.push(acc.clone());
            return;
        };
        free.remove(0);
        if allow_fixed {
            acc.push((first, first));
            go(free, acc, allow_fixed, out);
            acc.pop();
        }
        for i in 0..free.len() {
            let other = free.remove(i);
            acc.push((first, other));
            go(free, acc, allow_fixed, out);
            acc.pop();
            free.insert(i, other);
        }
        free.insert(0, first);
    }
    let mut out = Vec::new();
    if !allow_fixed && n % 2 == 1 {
        return out;
    }
    go(&mut (0..n).collect(), &mut Vec::new(), allow_fixed, &mut out);
    out
}

/// The standard vertex permutation for the given degrees: vertex j holds
/// consecutive labels.
pub fn standard_pi(degrees: &[usize]) -> Permutation {
    let mut images = Vec::new();
    let mut start = 0;
    for &d in degrees {
        for k in 0..d {
            images.push(start + (k + 1) % d);
        }
        start += d;
    }
    Permutation::from_images(images).expect("consecutive cycles form a permutation")
}

fn from_pairs(pi: &Permutation, pairs: &[(usize, usize)]) -> CombMap {
    let mut alpha: Vec<usize> = (0..pi.len()).collect();
    for &(a, b) in pairs {
        alpha[a] = b;
        alpha[b] = a;
    }
    CombMap::new(
        pi.clone(),
        Permutation::from_images(alpha).expect("pairs form an involution"),
        MapKind::Map,
    )
    .expect("an involution gives a valid map")
}

/// Every closed map with standard `pi` for these degrees (one per matching).
pub fn closed_maps_with_degrees(degrees: &[usize]) -> Result<Vec<CombMap>> {
    let m: usize = degrees.iter().sum();
    if m > 14 {
        return Err(Error::Capacity(format!("{m} directed edges is too many to enumerate")));
    }
    let pi = standard_pi(degrees);
    Ok(involutions(m, false).iter().map(|p| from_pairs(&pi, p)).collect())
}

/// All color assignments from `palette` (one color per degree class is not
/// required) that respect arity.
pub fn colorings(map: &CombMap, palette: &[&str]) -> Vec<ColoredMap> {
    let n = map.vertex_count();
    let mut out = Vec::new();
    let mut choice = vec![0usize; n];
    if palette.is_empty() {
        return if n == 0 {
            vec![ColoredMap::new(map.clone(), vec![]).expect("empty coloring")]
        } else {
            out
        };
    }
    loop {
        let colors = choice.iter().map(|&c| palette[c].to_string()).collect();
        if let Ok(cm) = ColoredMap::new(map.clone(), colors) {
            out.push(cm);
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            choice[i] += 1;
            if choice[i] < palette.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Connected closed colored maps up to equivalence, with at most
/// `max_vertices` vertices and `max_edges` directed edges. `arity` gives the
/// degree of each color.
pub fn connected_colored_maps(
    arity: &[(&str, usize)],
    max_vertices: usize,
    max_edges: usize,
) -> Result<Vec<ColoredMap>> {
    if max_edges > 14 {
        return Err(Error::Capacity(format!("{max_edges} directed edges is too many to enumerate")));
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    // Vertex order is free under relabeling, so colors can be taken sorted.
    let mut stack: Vec<Vec<usize>> = vec![vec![]];
    while let Some(choice) = stack.pop() {
        let edges: usize = choice.iter().map(|&c| arity[c].1).sum();
        if !choice.is_empty() && edges.is_multiple_of(2) {
            let degrees: Vec<usize> = choice.iter().map(|&c| arity[c].1).collect();
            let colors: Vec<String> = choice.iter().map(|&c| arity[c].0.to_string()).collect();
            for map in closed_maps_with_degrees(&degrees)? {
                if map.gamma() != 1 {
                    continue;
                }
                let cm = ColoredMap::new(map, colors.clone())?;
                let canon = super::canonical_form(&cm);
                if seen.insert(canon.key) {
                    out.push(canon.map);
                }
            }
        }
        if choice.len() < max_vertices {
            let start = choice.last().copied().unwrap_or(0);
            for (c, &(_, a)) in arity.iter().enumerate().skip(start) {
                if edges + a <= max_edges {
                    let mut next = choice.clone();
                    next.push(c);
                    stack.push(next);
                }
            }
        }
    }
    out.sort_by_key(|cm| (cm.map().vertex_count(), cm.map().edge_count(), super::serialize_map(cm)));
    Ok(out)
}

/// A uniformly random map with standard `pi` and `boundary` fixed points.
pub fn random_map<R: Rng + ?Sized>(rng: &mut R, degrees: &[usize], boundary: usize) -> Result<CombMap> {
    let m: usize = degrees.iter().sum();
    if boundary > m || (m - boundary) % 2 == 1 {
        return Err(Error::Precondition(format!(
            "cannot pair {} of {m} directed edges",
            m.saturating_sub(boundary)
        )));
    }
    let mut labels: Vec<usize> = (0..m).collect();
    labels.shuffle(rng);
    let pairs: Vec<(usize, usize)> = labels[boundary..].chunks(2).map(|c| (c[0], c[1])).collect();
    Ok(from_pairs(&standard_pi(degrees), &pairs))
}

/// A random hyper-map: slots are shuffled and cut into hyper-edges of size 2 or 3.
pub fn random_hypermap<R: Rng + ?Sized>(rng: &mut R, degrees: &[usize]) -> Result<CombMap> {
    let m: usize = degrees.iter().sum();
    if m < 2 {
        return Err(Error::Precondition("a hyper-map needs at least two slots".into()));
    }
    let mut labels: Vec<usize> = (0..m).collect();
    labels.shuffle(rng);
    let mut sizes = Vec::new();
    let mut left = m;
    while left > 0 {
        let s = if left == 2 || left == 3 {
            left
        } else if left == 4 {
            2
        } else if rng.random_bool(0.5) {
            3
        } else {
            2
        };
        sizes.push(s);
        left -= s;
    }
    let mut alpha = vec![0; m];
    let mut start = 0;
    for s in sizes {
        let cyc = &labels[start..start + s];
        for i in 0..s {
            alpha[cyc[i]] = cyc[(i + 1) % s];
        }
        start += s;
    }
    CombMap::new(standard_pi(degrees), Permutation::from_images(alpha)?, MapKind::Hypermap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial(n: usize) -> usize {
        (1..n).step_by(2).product::<usize>().max(1)
    }

    #[test]
    fn involution_counts() {
        for n in [2usize, 4, 6, 8] {
            assert_eq!(involutions(n, false).len(), double_factorial(n));
        }
        assert!(involutions(3, false).is_empty());
        // telephone numbers 1, 2, 4, 10, 26
        let counts: Vec<usize> = (1..=5).map(|n| involutions(n, true).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 10, 26]);
    }

    #[test]
    fn melon_degrees_give_all_matchings() {
        let maps = closed_maps_with_degrees(&[2, 2]).unwrap();
        assert_eq!(maps.len(), 3);
        assert!(maps.contains(&CombMap::melon(2, None).unwrap()));
    }

    #[test]
    fn colorings_respect_arity() {
        let m = CombMap::from_cycles(&[vec![1, 2], vec![3]], &[], MapKind::Map).unwrap();
        // a and b may each take degree 1 or 2, but not both
        assert_eq!(colorings(&m, &["a", "b"]).len(), 2);
        assert_eq!(colorings(&CombMap::melon(2, None).unwrap(), &["a", "b"]).len(), 4);
    }

    #[test]
    fn random_maps_are_valid() {
        let mut rng = rand::rng();
        for _ in 0..20 {
            let m = random_map(&mut rng, &[3, 2, 1], 2).unwrap();
            assert_eq!(m.boundary_count(), 2);
            let h = random_hypermap(&mut rng, &[2, 2, 3]).unwrap();
            assert!(h.alpha().fixed_points().is_empty());
        }
    }
}

//! Canonical representatives under relabelings that keep leg order,
//! boundary order and colors.
//!
//! Legs are rigidly ordered, so a breadth-first traversal from a root vertex
//! fixes the whole labeling of its component. Trying every root and keeping
//! the least encoding gives an exact canonical form.

use super::{ColoredMap, CombMap, SlotLink};
use crate::error::Result;
use rand::seq::IndexedRandom;
use rand::Rng;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub map: ColoredMap,
    /// Text serialization of `map`; equal iff the inputs are equivalent.
    pub key: String,
    pub hash: u64,
}

const BOUNDARY: u64 = 1 << 62;

fn encode_from(cm: &ColoredMap, root: usize, color_ids: &[u64]) -> (Vec<u64>, Vec<usize>) {
    let m = cm.map();
    let mut order = vec![usize::MAX; m.vertex_count()];
    let mut visit = vec![root];
    order[root] = 0;
    let mut head = 0;
    while head < visit.len() {
        let u = visit[head];
        head += 1;
        for &e in m.legs(u) {
            let w = m.vertex_of(m.alpha().apply(e));
            if order[w] == usize::MAX {
                order[w] = visit.len();
                visit.push(w);
            }
        }
    }
    let mut code = Vec::with_capacity(2 * m.edge_count() + 2 * visit.len());
    for &u in &visit {
        code.push(m.degree(u) as u64);
        code.push(color_ids[u]);
        for &e in m.legs(u) {
            let a = m.alpha().apply(e);
            match m.boundary_rank(e) {
                Some(r) if a == e => code.push(BOUNDARY + r as u64),
                _ => {
                    code.push(order[m.vertex_of(a)] as u64);
                    code.push(m.leg_of(a) as u64);
                }
            }
        }
    }
    (code, visit)
}

/// Canonical representative and hash of a colored map.
pub fn canonical_form(cm: &ColoredMap) -> Canonical {
    let m = cm.map();
    let mut names: Vec<&str> = cm.colors().iter().map(String::as_str).collect();
    names.sort_unstable();
    names.dedup();
    let color_ids: Vec<u64> = cm
        .colors()
        .iter()
        .map(|c| names.binary_search(&c.as_str()).unwrap() as u64)
        .collect();

    let mut parts: Vec<(Vec<u64>, Vec<usize>)> = m
        .components()
        .groups()
        .into_iter()
        .map(|group| {
            group
                .iter()
                .map(|&root| encode_from(cm, root, &color_ids))
                .min()
                .expect("components are non-empty")
        })
        .collect();
    parts.sort();

    let order: Vec<usize> = parts.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    let mut first = vec![0; m.vertex_count()];
    let mut acc = 0;
    for &v in &order {
        first[v] = acc;
        acc += m.degree(v);
    }
    let degrees: Vec<usize> = order.iter().map(|&v| m.degree(v)).collect();
    let mut links = Vec::with_capacity(m.edge_count());
    for &v in &order {
        for &e in m.legs(v) {
            let a = m.alpha().apply(e);
            links.push(match m.boundary_rank(e) {
                Some(r) if a == e => SlotLink::Boundary(r),
                _ => SlotLink::To(first[m.vertex_of(a)] + m.leg_of(a)),
            });
        }
    }
    let colors: Vec<String> = order.iter().map(|&v| cm.color(v).to_string()).collect();
    let map = ColoredMap::from_slots(&degrees, &links, &colors, m.kind())
        .expect("relabeling a valid map stays valid");
    let key = super::serialize_map(&map);
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    Canonical {
        map,
        key,
        hash: h.finish(),
    }
}

/// A uniformly random relabeling that keeps leg order, boundary order and
/// colors. Returns the relabeled map and the new index of each vertex.
pub fn random_relabel<R: Rng + ?Sized>(
    cm: &ColoredMap,
    rng: &mut R,
) -> Result<(ColoredMap, Vec<usize>)> {
    let m = cm.map();
    let n = m.edge_count();
    let mut label = vec![usize::MAX; n];
    let mut next_rank = 0;
    for step in 0..n {
        let candidates: Vec<usize> = (0..n)
            .filter(|&e| {
                if label[e] != usize::MAX {
                    return false;
                }
                let v = m.vertex_of(e);
                let head = m.legs(v)[0];
                if e != head && label[head] == usize::MAX {
                    return false;
                }
                match m.boundary_rank(e) {
                    Some(r) if m.alpha().apply(e) == e => r == next_rank,
                    _ => true,
                }
            })
            .collect();
        let &e = candidates.choose(rng).expect("a valid slot is always available");
        if m.alpha().apply(e) == e && m.boundary_rank(e).is_some() {
            next_rank += 1;
        }
        label[e] = step;
    }
    let mut pi = vec![0; n];
    let mut alpha = vec![0; n];
    for e in 0..n {
        pi[label[e]] = label[m.pi().apply(e)];
        alpha[label[e]] = label[m.alpha().apply(e)];
    }
    let map = CombMap::new(
        super::Permutation::from_images(pi)?,
        super::Permutation::from_images(alpha)?,
        m.kind(),
    )?;
    let new_index: Vec<usize> = (0..m.vertex_count())
        .map(|v| map.vertex_of(label[m.legs(v)[0]]))
        .collect();
    let mut colors = vec![String::new(); m.vertex_count()];
    for (v, &nv) in new_index.iter().enumerate() {
        colors[nv] = cm.color(v).to_string();
    }
    Ok((ColoredMap::new(map, colors)?, new_index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::{MapKind, Permutation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uni(m: CombMap) -> ColoredMap {
        ColoredMap::uniform(m, "s").unwrap()
    }

    /// Exhaustive oracle: try every relabeling of the edge set.
    fn equivalent_by_search(a: &ColoredMap, b: &ColoredMap) -> bool {
        let (ma, mb) = (a.map(), b.map());
        if ma.edge_count() != mb.edge_count() {
            return false;
        }
        Permutation::all(ma.edge_count()).into_iter().any(|s| {
            let s = s.images();
            (0..ma.edge_count()).all(|e| {
                s[ma.pi().apply(e)] == mb.pi().apply(s[e])
                    && s[ma.alpha().apply(e)] == mb.alpha().apply(s[e])
            }) && ma
                .vertices()
                .iter()
                .enumerate()
                .all(|(v, legs)| {
                    let w = mb.vertex_of(s[legs[0]]);
                    mb.legs(w)[0] == s[legs[0]] && a.color(v) == b.color(w)
                })
                && ma
                    .boundary()
                    .iter()
                    .zip(mb.boundary())
                    .all(|(&x, &y)| s[x] == y)
        })
    }

    #[test]
    fn relabelings_share_canonical_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base = CombMap::from_cycles(
            &[vec![1, 2, 3, 4, 5], vec![6, 7, 8], vec![9, 10]],
            &[vec![1, 2], vec![3, 6], vec![4, 7], vec![5, 9], vec![8, 10]],
            MapKind::Map,
        )
        .unwrap();
        let cm = ColoredMap::new(base, vec!["t1".into(), "t2".into(), "m".into()]).unwrap();
        let c0 = canonical_form(&cm);
        for _ in 0..50 {
            let (r, _) = random_relabel(&cm, &mut rng).unwrap();
            let c = canonical_form(&r);
            assert_eq!(c.key, c0.key);
            assert_eq!(c.hash, c0.hash);
        }
    }

    #[test]
    fn canonical_is_idempotent() {
        let cm = uni(CombMap::cycle(5).unwrap());
        let c = canonical_form(&cm);
        assert_eq!(canonical_form(&c.map), c);
    }

    #[test]
    fn melon_orientations_are_distinct_classes() {
        // Leg order is part of the structure: (1 3)(2 4) pairs leg i with leg i,
        // (1 4)(2 3) crosses them. They evaluate to Tr(M M^T) and Tr(M^2).
        let a = uni(CombMap::from_cycles(&[vec![1, 2], vec![3, 4]], &[vec![1, 3], vec![2, 4]], MapKind::Map).unwrap());
        let b = uni(CombMap::from_cycles(&[vec![1, 2], vec![3, 4]], &[vec![1, 4], vec![2, 3]], MapKind::Map).unwrap());
        assert!(!equivalent_by_search(&a, &b));
        assert_ne!(canonical_form(&a).key, canonical_form(&b).key);
    }

    #[test]
    fn colors_are_preserved() {
        let f = CombMap::melon(3, None).unwrap();
        let ab = ColoredMap::new(f.clone(), vec!["A".into(), "B".into()]).unwrap();
        let ba = ColoredMap::new(f, vec!["B".into(), "A".into()]).unwrap();
        // swapping the two vertices maps one onto the other
        assert_eq!(canonical_form(&ab).key, canonical_form(&ba).key);
        let aa = ColoredMap::uniform(CombMap::melon(3, None).unwrap(), "A").unwrap();
        assert_ne!(canonical_form(&ab).key, canonical_form(&aa).key);
    }

    #[test]
    fn canonical_agrees_with_exhaustive_search() {
        // all maps on pi = (1 2)(3 4 5 6)? too big; use 3-vertex degree-2 maps
        let pi = vec![vec![1, 2], vec![3, 4], vec![5, 6]];
        let mut maps = Vec::new();
        for alpha in crate::combmap::enumerate::involutions(6, false) {
            let cycles: Vec<Vec<usize>> = alpha.iter().map(|&(a, b)| vec![a + 1, b + 1]).collect();
            maps.push(uni(CombMap::from_cycles(&pi, &cycles, MapKind::Map).unwrap()));
        }
        for a in &maps {
            for b in &maps {
                assert_eq!(
                    canonical_form(a).key == canonical_form(b).key,
                    equivalent_by_search(a, b)
                );
            }
        }
    }

    #[test]
    fn boundary_order_is_part_of_the_class() {
        let one = CombMap::star(1).unwrap();
        let two = ColoredMap::new(one.disjoint_union(&one).unwrap(), vec!["A".into(), "B".into()]).unwrap();
        let swap = Permutation::from_cycles(2, &[vec![1, 2]]).unwrap();
        let t = crate::combmap::permute_boundary(&two, &swap).unwrap();
        assert_eq!(t.colors(), &["B".to_string(), "A".to_string()]);
        assert!(!equivalent_by_search(&two, &t));
        assert_ne!(canonical_form(&two).key, canonical_form(&t).key);
    }

    #[test]
    fn boundary_order_against_leg_order_is_unrealizable() {
        let s = uni(CombMap::star(2).unwrap());
        let swap = Permutation::from_cycles(2, &[vec![1, 2]]).unwrap();
        assert!(crate::combmap::permute_boundary(&s, &swap).is_err());
    }
}

//! Melonic maps and their census.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;

use super::{covering_switches, require_closed};
use crate::combmap::{canonical_form, standard_pi, ColoredMap, CombMap, MapKind, Permutation};
use crate::error::{Error, Result};

/// Two vertices with every edge running between them.
fn is_melon(m: &CombMap) -> bool {
    m.vertex_count() == 2
        && m.degree(0) == m.degree(1)
        && m.edges().iter().all(|e| m.vertex_of(e[0]) != m.vertex_of(e[1]))
}

/// Recursive melonic test: the empty map is melonic, and a map is melonic
/// when it, or a map one disconnecting switch below it, has a melon
/// component whose complement is melonic.
pub fn is_melonic(m: &CombMap) -> bool {
    if require_closed(m).is_err() {
        return false;
    }
    let mut memo = HashMap::new();
    melonic_rec(m, &mut memo)
}

fn key(m: &CombMap) -> String {
    // Coloring by degree keeps mixed-degree maps consistent.
    let colors = m.degrees().iter().map(|d| d.to_string()).collect();
    canonical_form(&ColoredMap::new(m.clone(), colors).expect("degree coloring is consistent")).key
}

fn splits_off_melon(m: &CombMap, memo: &mut HashMap<String, bool>) -> bool {
    let groups = m.components().groups();
    for (i, g) in groups.iter().enumerate() {
        if g.len() != 2 || !is_melon(&m.restrict(g).expect("component")) {
            continue;
        }
        let rest: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, g)| g.iter().copied())
            .collect();
        if rest.is_empty() || melonic_rec(&m.restrict(&rest).expect("union of components"), memo) {
            return true;
        }
    }
    false
}

fn melonic_rec(m: &CombMap, memo: &mut HashMap<String, bool>) -> bool {
    if m.vertex_count() == 0 {
        return true;
    }
    if m.vertex_count() % 2 == 1 {
        return false;
    }
    let k = key(m);
    if let Some(&v) = memo.get(&k) {
        return v;
    }
    let result = splits_off_melon(m, memo)
        || covering_switches(m)
            .expect("closed")
            .into_iter()
            .filter(|s| s.delta_gamma == 1)
            .any(|s| splits_off_melon(&s.map, memo));
    memo.insert(k, result);
    result
}

/// `F_p(k) = C(pk+1, k) / (pk+1)`.
pub fn fuss_catalan(p: u32, k: u32) -> BigUint {
    let n = u64::from(p) * u64::from(k) + 1;
    let mut c = BigUint::from(1u32);
    for i in 0..u64::from(k) {
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    c / BigUint::from(n)
}

/// A p-ary plane tree: slot `c` of a node is either empty or holds a child.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Tree(Vec<Option<Tree>>);

fn trees(p: usize, k: usize, memo: &mut HashMap<usize, Vec<Tree>>) -> Vec<Tree> {
    if let Some(t) = memo.get(&k) {
        return t.clone();
    }
    let mut out = Vec::new();
    if k > 0 {
        // distribute k-1 nodes over p ordered slots
        let mut sizes = vec![0usize; p];
        distribute(p, k - 1, 0, &mut sizes, &mut |sizes| {
            let mut partial: Vec<Vec<Option<Tree>>> = vec![Vec::new()];
            for &s in sizes {
                let options: Vec<Option<Tree>> = if s == 0 {
                    vec![None]
                } else {
                    trees(p, s, memo).into_iter().map(Some).collect()
                };
                partial = partial
                    .into_iter()
                    .flat_map(|prefix| {
                        options.iter().map(move |o| {
                            let mut v = prefix.clone();
                            v.push(o.clone());
                            v
                        })
                    })
                    .collect();
            }
            out.extend(partial.into_iter().map(Tree));
        });
    }
    memo.insert(k, out.clone());
    out
}

fn distribute(p: usize, left: usize, slot: usize, sizes: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if slot == p - 1 {
        sizes[slot] = left;
        f(sizes);
        return;
    }
    for s in 0..=left {
        sizes[slot] = s;
        distribute(p, left - s, slot + 1, sizes, f);
    }
}

/// Glue identity melons along a tree: a child in slot `c` is inserted on the
/// current color-`c` edge of its parent. Vertices are numbered white, black
/// per node in depth-first order; leg `c` carries color `c`.
fn tree_to_map(p: usize, tree: &Tree, k: usize) -> CombMap {
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut next = 2;
    fn walk(t: &Tree, slots: Vec<(usize, usize)>, next: &mut usize, edges: &mut Vec<(usize, usize, usize)>) {
        for (c, child) in t.0.iter().enumerate() {
            let (white, black) = slots[c];
            match child {
                None => edges.push((white, black, c)),
                Some(ch) => {
                    let (w, b) = (*next, *next + 1);
                    *next += 2;
                    edges.push((white, b, c));
                    let mut inner = vec![(w, b); slots.len()];
                    inner[c] = (w, black);
                    walk(ch, inner, next, edges);
                }
            }
        }
    }
    walk(tree, vec![(0, 1); p], &mut next, &mut edges);
    debug_assert_eq!(next, 2 * k);
    let mut alpha = vec![0; 2 * k * p];
    for (w, b, c) in edges {
        let (x, y) = (w * p + c, b * p + c);
        alpha[x] = y;
        alpha[y] = x;
    }
    CombMap::new(
        standard_pi(&vec![p; 2 * k]),
        Permutation::from_images(alpha).expect("melon gluing pairs every leg"),
        MapKind::Map,
    )
    .expect("glued melons form a map")
}

/// Every map obtained by gluing `k` identity melons of degree `p` along a
/// p-ary tree, one per tree.
pub fn melonic_trees(p: usize, k: usize) -> Vec<CombMap> {
    trees(p, k, &mut HashMap::new())
        .iter()
        .map(|t| tree_to_map(p, t, k))
        .collect()
}

/// One census row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRow {
    pub p: usize,
    pub k: usize,
    /// Distinct labeled maps (fixed `pi`) from identity-melon gluings.
    pub enumerated: usize,
    pub fuss_catalan: BigUint,
    /// Number of those maps up to relabeling.
    pub classes: usize,
    /// Whether every enumerated map passed [`is_melonic`].
    pub all_melonic: bool,
}

pub fn melonic_census(p: usize, k: usize) -> Result<CensusRow> {
    if p < 2 || k < 1 {
        return Err(Error::Precondition(format!("census needs p >= 2 and k >= 1, got p={p}, k={k}")));
    }
    if 2 * k * p > 24 {
        return Err(Error::Capacity(format!("census at p={p}, k={k} exceeds 24 directed edges")));
    }
    let maps = melonic_trees(p, k);
    let distinct: HashSet<Vec<usize>> = maps.iter().map(|m| m.alpha().images().to_vec()).collect();
    let classes: HashSet<String> = maps.iter().map(key).collect();
    let all_melonic = maps.iter().all(is_melonic);
    Ok(CensusRow {
        p,
        k,
        enumerated: distinct.len(),
        fuss_catalan: fuss_catalan(p as u32, k as u32),
        classes: classes.len(),
        all_melonic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::closed_maps_with_degrees;
    use rand::{Rng, SeedableRng};

    #[test]
    fn fuss_catalan_values() {
        let cat: Vec<u32> = (1..=3).map(|k| fuss_catalan(2, k).try_into().unwrap()).collect();
        assert_eq!(cat, vec![1, 2, 5]);
        assert_eq!(fuss_catalan(3, 2), BigUint::from(3u32));
        assert_eq!(fuss_catalan(3, 3), BigUint::from(12u32));
    }

    #[test]
    fn census_matches_fuss_catalan() {
        for (p, k) in [(2, 1), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let row = melonic_census(p, k).unwrap();
            assert_eq!(BigUint::from(row.enumerated), row.fuss_catalan, "p={p} k={k}");
            assert!(row.all_melonic);
        }
    }

    #[test]
    fn melons_are_melonic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for p in 2..=4 {
            for _ in 0..5 {
                let mut images: Vec<usize> = (0..p).collect();
                for i in (1..p).rev() {
                    images.swap(i, rng.random_range(0..=i));
                }
                let sigma = Permutation::from_images(images).unwrap();
                assert!(is_melonic(&CombMap::melon(p, Some(&sigma)).unwrap()));
            }
        }
    }

    #[test]
    fn four_cycle_is_melonic_and_tetrahedron_is_not() {
        assert!(is_melonic(&CombMap::cycle(4).unwrap()));
        // K4 with degree-3 vertices
        let k4 = CombMap::from_cycles(
            &[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9], vec![10, 11, 12]],
            &[vec![1, 4], vec![2, 7], vec![3, 10], vec![5, 8], vec![6, 11], vec![9, 12]],
            MapKind::Map,
        )
        .unwrap();
        assert!(!is_melonic(&k4));
        assert!(!is_melonic(&CombMap::bouquet(2, None).unwrap()));
    }

    #[test]
    fn minimal_maps_of_melonic_maps_are_bouquets() {
        for m in closed_maps_with_degrees(&[2, 2, 2, 2]).unwrap() {
            if is_melonic(&m) {
                let low = super::super::minimal_map(&m).unwrap();
                assert_eq!(low.gamma(), low.vertex_count());
            }
        }
    }

    #[test]
    fn mixed_degrees_do_not_panic() {
        let two = CombMap::melon(2, None).unwrap();
        let four = CombMap::melon(4, None).unwrap();
        assert!(is_melonic(&two.disjoint_union(&four).unwrap()));
        let mixed = CombMap::from_cycles(&[vec![1, 2], vec![3, 4, 5, 6]], &[vec![1, 3], vec![2, 4], vec![5, 6]], MapKind::Map);
        assert!(!is_melonic(&mixed.unwrap()));
    }
}

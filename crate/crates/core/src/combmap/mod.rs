//! Combinatorial maps and hyper-maps as permutation pairs `(pi, alpha)`.
//!
//! Directed edges (half-edges) are `0..m`. Vertices are the cycles of `pi`,
//! ordered by least element, each cycle read from its least element: the
//! k-th element of a cycle is leg k of the vertex. Fixed points of `alpha`
//! are boundary edges, ranked by label.

mod canonical;
mod codec;
mod enumerate;
mod perm;
mod surgery;

pub use canonical::{canonical_form, random_relabel, Canonical};
pub use codec::{parse_map, parse_maps, serialize_map};
pub use enumerate::{
    closed_maps_with_degrees, colorings, connected_colored_maps, involutions, random_hypermap, random_map,
    standard_pi,
};
pub use perm::Permutation;
pub use surgery::{alpha_wires, close_boundary, compose, extend, permute_boundary, remove_vertex, rewire, End};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapKind {
    Map,
    Hypermap,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CombMap {
    pi: Permutation,
    alpha: Permutation,
    kind: MapKind,
    vertices: Vec<Vec<usize>>,
    vertex_of: Vec<usize>,
    leg_of: Vec<usize>,
    boundary: Vec<usize>,
}

/// What a slot is wired to when building a map from per-vertex legs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotLink {
    /// `alpha` image, as a flat slot index.
    To(usize),
    /// Boundary with the given rank (0 = first boundary).
    Boundary(usize),
}

impl CombMap {
    pub fn new(pi: Permutation, alpha: Permutation, kind: MapKind) -> Result<Self> {
        if pi.len() != alpha.len() {
            return Err(Error::InvalidMap {
                edge: pi.len().min(alpha.len()) + 1,
                reason: "pi and alpha act on different edge sets".into(),
            });
        }
        match kind {
            MapKind::Map => {
                if let Some(e) = (0..alpha.len()).find(|&e| alpha.apply(alpha.apply(e)) != e) {
                    return Err(Error::InvalidMap {
                        edge: e + 1,
                        reason: "alpha is not an involution".into(),
                    });
                }
            }
            MapKind::Hypermap => {
                if let Some(e) = alpha.fixed_points().first() {
                    return Err(Error::InvalidMap {
                        edge: e + 1,
                        reason: "hyper-map alpha has a fixed point".into(),
                    });
                }
            }
        }
        let vertices = pi.cycles();
        let mut vertex_of = vec![0; pi.len()];
        let mut leg_of = vec![0; pi.len()];
        for (v, cycle) in vertices.iter().enumerate() {
            for (k, &e) in cycle.iter().enumerate() {
                vertex_of[e] = v;
                leg_of[e] = k;
            }
        }
        let boundary = alpha.fixed_points();
        Ok(CombMap {
            pi,
            alpha,
            kind,
            vertices,
            vertex_of,
            leg_of,
            boundary,
        })
    }

    /// Build from 1-based cycle lists.
    pub fn from_cycles(
        pi_cycles: &[Vec<usize>],
        alpha_cycles: &[Vec<usize>],
        kind: MapKind,
    ) -> Result<Self> {
        let m = pi_cycles.iter().map(Vec::len).sum::<usize>();
        let mut covered = vec![false; m];
        for &e in pi_cycles.iter().flatten() {
            if e == 0 || e > m || covered[e - 1] {
                return Err(Error::InvalidMap {
                    edge: e,
                    reason: "pi cycles do not partition 1..m".into(),
                });
            }
            covered[e - 1] = true;
        }
        let pi = Permutation::from_cycles(m, pi_cycles)?;
        let alpha = Permutation::from_cycles(m, alpha_cycles)?;
        CombMap::new(pi, alpha, kind)
    }

    /// Build a map from per-vertex legs given in a preferred vertex order.
    ///
    /// Labels are assigned so that boundaries get increasing labels in rank
    /// order and each vertex's first leg is its least label. Returns the map
    /// and the new index of each input vertex.
    pub fn from_slots(
        degrees: &[usize],
        links: &[SlotLink],
        kind: MapKind,
    ) -> Result<(Self, Vec<usize>)> {
        let m: usize = degrees.iter().sum();
        if links.len() != m {
            return Err(Error::Arity(format!(
                "{} slot links for {m} slots",
                links.len()
            )));
        }
        let mut first = Vec::with_capacity(degrees.len());
        let mut owner = Vec::with_capacity(m);
        let mut acc = 0;
        for (v, &d) in degrees.iter().enumerate() {
            first.push(acc);
            owner.extend(std::iter::repeat_n(v, d));
            acc += d;
        }
        let mut bounds: Vec<(usize, usize)> = links
            .iter()
            .enumerate()
            .filter_map(|(s, l)| match l {
                SlotLink::Boundary(r) => Some((*r, s)),
                SlotLink::To(_) => None,
            })
            .collect();
        bounds.sort_unstable();
        if bounds.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Precondition("duplicate boundary rank".into()));
        }
        let mut label = vec![usize::MAX; m];
        let mut next = 0;
        let mut place = |s: usize, label: &mut Vec<usize>| {
            if label[s] == usize::MAX {
                label[s] = next;
                next += 1;
            }
        };
        for &(_, s) in &bounds {
            place(first[owner[s]], &mut label);
            place(s, &mut label);
        }
        for (v, &d) in degrees.iter().enumerate() {
            for s in first[v]..first[v] + d {
                place(s, &mut label);
            }
        }
        if bounds.windows(2).any(|w| label[w[0].1] > label[w[1].1]) {
            return Err(Error::Precondition(
                "boundary order conflicts with the least-leg-first convention".into(),
            ));
        }
        let mut pi = vec![0; m];
        let mut alpha = vec![0; m];
        for (v, &d) in degrees.iter().enumerate() {
            for j in 0..d {
                let s = first[v] + j;
                pi[label[s]] = label[first[v] + (j + 1) % d];
            }
        }
        for (s, l) in links.iter().enumerate() {
            alpha[label[s]] = match *l {
                SlotLink::To(t) if t < m => label[t],
                SlotLink::To(t) => {
                    return Err(Error::InvalidMap {
                        edge: t + 1,
                        reason: "slot link out of range".into(),
                    })
                }
                SlotLink::Boundary(_) => label[s],
            };
        }
        let map = CombMap::new(
            Permutation::from_images(pi)?,
            Permutation::from_images(alpha)?,
            kind,
        )?;
        let new_index = (0..degrees.len())
            .map(|v| {
                if degrees[v] == 0 {
                    usize::MAX
                } else {
                    map.vertex_of(label[first[v]])
                }
            })
            .collect();
        Ok((map, new_index))
    }

    pub fn star(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::Precondition("star needs q >= 1".into()));
        }
        CombMap::new(Permutation::cycle_of(q), Permutation::identity(q), MapKind::Map)
    }

    /// `b_p^sigma`: one vertex, pairs `(2k-1, 2 sigma(k))` in 1-based labels.
    pub fn bouquet(p: usize, sigma: Option<&Permutation>) -> Result<Self> {
        if p == 0 || p % 2 == 1 {
            return Err(Error::Precondition(format!("bouquet needs even p >= 2, got {p}")));
        }
        let t = p / 2;
        let id = Permutation::identity(t);
        let sigma = sigma.unwrap_or(&id);
        if sigma.len() != t {
            return Err(Error::Arity(format!("bouquet sigma must be in S_{t}")));
        }
        let mut alpha = vec![0; p];
        for k in 0..t {
            let a = 2 * k;
            let b = 2 * sigma.apply(k) + 1;
            alpha[a] = b;
            alpha[b] = a;
        }
        CombMap::new(
            Permutation::cycle_of(p),
            Permutation::from_images(alpha)?,
            MapKind::Map,
        )
    }

    /// `f_p^sigma`: two vertices, `alpha = (i, p + sigma(i))` in 1-based labels.
    pub fn melon(p: usize, sigma: Option<&Permutation>) -> Result<Self> {
        if p == 0 {
            return Err(Error::Precondition("melon needs p >= 1".into()));
        }
        let id = Permutation::identity(p);
        let sigma = sigma.unwrap_or(&id);
        if sigma.len() != p {
            return Err(Error::Arity(format!("melon sigma must be in S_{p}")));
        }
        let mut pi = vec![0; 2 * p];
        let mut alpha = vec![0; 2 * p];
        for i in 0..p {
            pi[i] = (i + 1) % p;
            pi[p + i] = p + (i + 1) % p;
            alpha[i] = p + sigma.apply(i);
            alpha[p + sigma.apply(i)] = i;
        }
        CombMap::new(
            Permutation::from_images(pi)?,
            Permutation::from_images(alpha)?,
            MapKind::Map,
        )
    }

    /// Cycle of `k` degree-2 vertices, vertex j's leg 2 wired to vertex j+1's leg 1.
    pub fn cycle(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("cycle needs k >= 1".into()));
        }
        let degrees = vec![2; k];
        let links: Vec<SlotLink> = (0..2 * k)
            .map(|s| {
                let v = s / 2;
                if s % 2 == 1 {
                    SlotLink::To(2 * ((v + 1) % k))
                } else {
                    SlotLink::To(2 * ((v + k - 1) % k) + 1)
                }
            })
            .collect();
        Ok(CombMap::from_slots(&degrees, &links, MapKind::Map)?.0)
    }

    pub fn empty() -> Self {
        CombMap::new(Permutation::identity(0), Permutation::identity(0), MapKind::Map)
            .expect("empty map is valid")
    }

    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    pub fn alpha(&self) -> &Permutation {
        &self.alpha
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    /// Number of directed edges.
    pub fn edge_count(&self) -> usize {
        self.pi.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// `∂v`, starting at its least element.
    pub fn legs(&self, v: usize) -> &[usize] {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vec<usize>] {
        &self.vertices
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertices[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.vertices.iter().map(Vec::len).collect()
    }

    #[inline]
    pub fn vertex_of(&self, e: usize) -> usize {
        self.vertex_of[e]
    }

    #[inline]
    pub fn leg_of(&self, e: usize) -> usize {
        self.leg_of[e]
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    /// Rank of `e` among boundary edges.
    pub fn boundary_rank(&self, e: usize) -> Option<usize> {
        self.boundary.binary_search(&e).ok()
    }

    /// Hyper-edges (cycles of `alpha` of length at least two).
    pub fn edges(&self) -> Vec<Vec<usize>> {
        self.alpha.cycles().into_iter().filter(|c| c.len() > 1).collect()
    }

    pub fn all_degrees_even(&self) -> bool {
        self.vertices.iter().all(|c| c.len() % 2 == 0)
    }

    /// Connected components through edges of `alpha`.
    pub fn components(&self) -> Components {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in 0..self.edge_count() {
            let a = find(&mut parent, self.vertex_of[e]);
            let b = find(&mut parent, self.vertex_of[self.alpha.apply(e)]);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut of_vertex = vec![0; n];
        for (v, slot) in of_vertex.iter_mut().enumerate() {
            let r = find(&mut parent, v);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            *slot = label[r];
        }
        Components { of_vertex, count }
    }

    pub fn gamma(&self) -> usize {
        self.components().count
    }

    /// Same `pi`, different `alpha`.
    pub fn with_alpha(&self, alpha: Permutation) -> Result<Self> {
        CombMap::new(self.pi.clone(), alpha, self.kind)
    }

    /// The sub-map induced on a union of components, labels compressed in
    /// increasing order.
    pub fn restrict(&self, vertices: &[usize]) -> Result<Self> {
        let mut keep = vec![false; self.vertex_count()];
        for &v in vertices {
            keep[v] = true;
        }
        let mut new_label = vec![usize::MAX; self.edge_count()];
        let mut next = 0;
        for e in 0..self.edge_count() {
            if keep[self.vertex_of[e]] {
                new_label[e] = next;
                next += 1;
            }
        }
        let mut pi = vec![0; next];
        let mut alpha = vec![0; next];
        for e in 0..self.edge_count() {
            if new_label[e] == usize::MAX {
                continue;
            }
            let a = self.alpha.apply(e);
            if new_label[a] == usize::MAX {
                return Err(Error::Precondition(
                    "restriction cuts an edge; pass whole components".into(),
                ));
            }
            pi[new_label[e]] = new_label[self.pi.apply(e)];
            alpha[new_label[e]] = new_label[a];
        }
        CombMap::new(
            Permutation::from_images(pi)?,
            Permutation::from_images(alpha)?,
            self.kind,
        )
    }

    /// `self ⊔ other`, labels of `other` shifted past those of `self`.
    pub fn disjoint_union(&self, other: &CombMap) -> Result<Self> {
        let m = self.edge_count();
        let shift = |p: &Permutation| p.images().iter().map(|&e| e + m).collect::<Vec<_>>();
        let mut pi = self.pi.images().to_vec();
        pi.extend(shift(&other.pi));
        let mut alpha = self.alpha.images().to_vec();
        alpha.extend(shift(&other.alpha));
        let kind = if self.kind == MapKind::Hypermap || other.kind == MapKind::Hypermap {
            MapKind::Hypermap
        } else {
            MapKind::Map
        };
        CombMap::new(
            Permutation::from_images(pi)?,
            Permutation::from_images(alpha)?,
            kind,
        )
    }

    /// Flat slot view: degrees and links in the current vertex order.
    pub fn slots(&self) -> (Vec<usize>, Vec<SlotLink>) {
        let degrees = self.degrees();
        let mut flat = vec![0; self.edge_count()];
        let mut acc = 0;
        for legs in &self.vertices {
            for &e in legs {
                flat[e] = acc;
                acc += 1;
            }
        }
        let mut links = vec![SlotLink::Boundary(0); self.edge_count()];
        for legs in &self.vertices {
            for &e in legs {
                let a = self.alpha.apply(e);
                links[flat[e]] = match self.boundary_rank(e) {
                    Some(r) if a == e => SlotLink::Boundary(r),
                    _ => SlotLink::To(flat[a]),
                };
            }
        }
        (degrees, links)
    }
}

impl Permutation {
    /// The single cycle `(0 1 .. m-1)`.
    pub fn cycle_of(m: usize) -> Self {
        Permutation::from_images((0..m).map(|e| (e + 1) % m).collect())
            .expect("a cycle is a bijection")
    }
}

/// Vertex partition into connected components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    /// Component index of each vertex, numbered by least vertex.
    pub of_vertex: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.of_vertex.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

/// A map whose vertices carry color names.
///
/// Arity is implicit: every vertex with a given color must have the same degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColoredMap {
    map: CombMap,
    colors: Vec<String>,
}

impl ColoredMap {
    pub fn new(map: CombMap, colors: Vec<String>) -> Result<Self> {
        if colors.len() != map.vertex_count() {
            return Err(Error::Arity(format!(
                "{} colors for {} vertices",
                colors.len(),
                map.vertex_count()
            )));
        }
        let mut arity: std::collections::HashMap<&str, usize> = Default::default();
        for (v, c) in colors.iter().enumerate() {
            let d = map.degree(v);
            if let Some(&prev) = arity.get(c.as_str()) {
                if prev != d {
                    return Err(Error::Arity(format!(
                        "color {c} used with degrees {prev} and {d}"
                    )));
                }
            }
            arity.insert(c, d);
        }
        Ok(ColoredMap { map, colors })
    }

    /// All vertices share one color.
    pub fn uniform(map: CombMap, color: &str) -> Result<Self> {
        let n = map.vertex_count();
        ColoredMap::new(map, vec![color.to_string(); n])
    }

    pub fn map(&self) -> &CombMap {
        &self.map
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> &str {
        &self.colors[v]
    }

    pub fn into_parts(self) -> (CombMap, Vec<String>) {
        (self.map, self.colors)
    }

    pub fn with_alpha(&self, alpha: Permutation) -> Result<Self> {
        Ok(ColoredMap {
            map: self.map.with_alpha(alpha)?,
            colors: self.colors.clone(),
        })
    }

    pub fn disjoint_union(&self, other: &ColoredMap) -> Result<Self> {
        let mut colors = self.colors.clone();
        colors.extend(other.colors.iter().cloned());
        ColoredMap::new(self.map.disjoint_union(&other.map)?, colors)
    }

    pub fn restrict(&self, vertices: &[usize]) -> Result<Self> {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        let colors = sorted.iter().map(|&v| self.colors[v].clone()).collect();
        ColoredMap::new(self.map.restrict(&sorted)?, colors)
    }

    /// Connected components as separate colored maps.
    pub fn split_components(&self) -> Vec<ColoredMap> {
        self.map
            .components()
            .groups()
            .iter()
            .map(|g| self.restrict(g).expect("components are closed under alpha"))
            .collect()
    }

    pub fn from_slots(
        degrees: &[usize],
        links: &[SlotLink],
        colors: &[String],
        kind: MapKind,
    ) -> Result<Self> {
        let (map, new_index) = CombMap::from_slots(degrees, links, kind)?;
        let mut out = vec![String::new(); map.vertex_count()];
        for (v, &nv) in new_index.iter().enumerate() {
            if nv != usize::MAX {
                out[nv] = colors[v].clone();
            }
        }
        ColoredMap::new(map, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> CombMap {
        CombMap::from_cycles(
            &[vec![1, 2, 3, 4, 5], vec![6, 7, 8], vec![9, 10]],
            &[vec![1, 2], vec![3, 6], vec![4, 7], vec![5, 9], vec![8, 10]],
            MapKind::Map,
        )
        .unwrap()
    }

    #[test]
    fn figure_one_map() {
        let m = fig1();
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.degrees(), vec![5, 3, 2]);
        assert_eq!(m.boundary_count(), 0);
        assert_eq!(m.gamma(), 1);
    }

    #[test]
    fn single_fixed_point_is_star() {
        let m = CombMap::from_cycles(&[vec![1]], &[vec![1]], MapKind::Map).unwrap();
        assert_eq!(m.vertex_count(), 1);
        assert_eq!(m.boundary_count(), 1);
        assert_eq!(m, CombMap::star(1).unwrap());
    }

    #[test]
    fn three_cycle_alpha_is_not_a_map() {
        let err = CombMap::from_cycles(&[vec![1, 2, 3]], &[vec![1, 2, 3]], MapKind::Map)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidMap { edge: 1, .. }));
        assert!(CombMap::from_cycles(&[vec![1, 2, 3]], &[vec![1, 2, 3]], MapKind::Hypermap).is_ok());
    }

    #[test]
    fn hypermap_rejects_fixed_points() {
        let err =
            CombMap::from_cycles(&[vec![1, 2, 3]], &[vec![1, 2]], MapKind::Hypermap).unwrap_err();
        assert!(matches!(err, Error::InvalidMap { edge: 3, .. }));
    }

    #[test]
    fn melon_five() {
        let m = CombMap::melon(5, None).unwrap();
        assert_eq!(m.pi().to_cycle_string(), "(1 2 3 4 5)(6 7 8 9 10)");
        assert_eq!(m.alpha().to_cycle_string(), "(1 6)(2 7)(3 8)(4 9)(5 10)");
        assert_eq!(m.gamma(), 1);
    }

    #[test]
    fn melon_two_transposed() {
        let t = Permutation::from_cycles(2, &[vec![1, 2]]).unwrap();
        let m = CombMap::melon(2, Some(&t)).unwrap();
        assert_eq!(m.alpha().to_cycle_string(), "(1 4)(2 3)");
    }

    #[test]
    fn bouquets() {
        let b2 = CombMap::bouquet(2, None).unwrap();
        assert_eq!(b2.vertex_count(), 1);
        assert_eq!(b2.edges().len(), 1);
        let s = Permutation::from_cycles(2, &[vec![1, 2]]).unwrap();
        let b4 = CombMap::bouquet(4, Some(&s)).unwrap();
        assert_eq!(b4.alpha().to_cycle_string(), "(1 4)(2 3)");
        assert!(CombMap::bouquet(3, None).is_err());
    }

    #[test]
    fn union_gamma_is_additive() {
        let b2 = CombMap::bouquet(2, None).unwrap();
        let u = b2.disjoint_union(&b2).unwrap();
        assert_eq!(u.gamma(), 2);
        let f = CombMap::melon(3, None).unwrap();
        assert_eq!(u.disjoint_union(&f).unwrap().gamma(), 3);
    }

    #[test]
    fn from_slots_orders_boundaries_by_rank() {
        let links = [SlotLink::Boundary(1), SlotLink::Boundary(0)];
        let (m, idx) = CombMap::from_slots(&[1, 1], &links, MapKind::Map).unwrap();
        assert_eq!(idx, vec![1, 0]);
        assert_eq!(m.boundary(), &[0, 1]);
    }

    #[test]
    fn cycle_map() {
        let c = CombMap::cycle(4).unwrap();
        assert_eq!(c.degrees(), vec![2; 4]);
        assert_eq!(c.gamma(), 1);
        assert!(c.is_closed());
        assert_eq!(CombMap::cycle(2).unwrap().alpha().to_cycle_string(), "(1 4)(2 3)");
    }

    #[test]
    fn colored_arity_checked() {
        let m = CombMap::melon(2, None).unwrap().disjoint_union(&CombMap::bouquet(4, None).unwrap()).unwrap();
        assert!(ColoredMap::new(m.clone(), vec!["a".into(), "a".into(), "a".into()]).is_err());
        assert!(ColoredMap::new(m, vec!["a".into(), "a".into(), "b".into()]).is_ok());
    }
}

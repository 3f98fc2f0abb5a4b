//! Boundary surgery: closing, extending by a vertex, removing a vertex,
//! permuting boundaries, substitution of sub-maps, and generic rewiring.

use super::{ColoredMap, CombMap, MapKind, Permutation, SlotLink};
use crate::error::{Error, Result};

/// `m^{∘B}`: pair boundaries `(e_1,e_2), (e_3,e_4), ..`.
pub fn close_boundary(cm: &ColoredMap) -> Result<ColoredMap> {
    let m = cm.map();
    let q = m.boundary_count();
    if q % 2 == 1 {
        return Err(Error::Precondition(format!("cannot close {q} boundaries (odd)")));
    }
    let mut alpha = m.alpha().images().to_vec();
    for pair in m.boundary().chunks(2) {
        alpha[pair[0]] = pair[1];
        alpha[pair[1]] = pair[0];
    }
    cm.with_alpha(Permutation::from_images(alpha)?)
}

/// `m^{+s}`: wire the first `p` boundaries to a new vertex of color `color`
/// whose leg i is matched with boundary i. The new vertex comes last.
pub fn extend(cm: &ColoredMap, color: &str, p: usize) -> Result<ColoredMap> {
    let m = cm.map();
    if p == 0 || m.boundary_count() < p {
        return Err(Error::Precondition(format!(
            "extend by degree {p} needs at least {p} boundaries, map has {}",
            m.boundary_count()
        )));
    }
    let n = m.edge_count();
    let mut pi = m.pi().images().to_vec();
    let mut alpha = m.alpha().images().to_vec();
    for i in 0..p {
        pi.push(n + (i + 1) % p);
        let e = m.boundary()[i];
        alpha.push(e);
        alpha[e] = n + i;
    }
    let map = CombMap::new(Permutation::from_images(pi)?, Permutation::from_images(alpha)?, m.kind())?;
    let mut colors = cm.colors().to_vec();
    colors.push(color.to_string());
    ColoredMap::new(map, colors)
}

/// `m^{\v}`: remove `v`; the partners of its legs become the first
/// `deg(v)` boundaries in leg order, existing boundaries follow.
///
/// Labels of the kept edges are compressed in increasing order when that
/// already realizes the boundary ranking, otherwise the map is relabeled.
pub fn remove_vertex(cm: &ColoredMap, v: usize) -> Result<ColoredMap> {
    let m = cm.map();
    if m.vertex_count() < 2 {
        return Err(Error::Precondition("remove needs at least two vertices".into()));
    }
    if v >= m.vertex_count() {
        return Err(Error::Precondition(format!("no vertex {v}")));
    }
    if m.kind() != MapKind::Map {
        return Err(Error::Unsupported("remove on hyper-maps".into()));
    }
    let legs = m.legs(v);
    let p = legs.len();
    let mut rank = vec![None; m.edge_count()];
    for (k, &f) in legs.iter().enumerate() {
        let a = m.alpha().apply(f);
        if a == f || m.vertex_of(a) == v {
            return Err(Error::Precondition(format!(
                "vertex {v} has a loop or a boundary leg; remove is undefined"
            )));
        }
        rank[a] = Some(k);
    }
    for (j, &e) in m.boundary().iter().enumerate() {
        rank[e] = Some(p + j);
    }
    // Fast path: compress labels.
    let kept: Vec<usize> = (0..m.edge_count()).filter(|&e| m.vertex_of(e) != v).collect();
    let mut new_label = vec![usize::MAX; m.edge_count()];
    for (i, &e) in kept.iter().enumerate() {
        new_label[e] = i;
    }
    let mut ranked: Vec<(usize, usize)> = kept
        .iter()
        .filter_map(|&e| rank[e].map(|r| (new_label[e], r)))
        .collect();
    ranked.sort_unstable();
    let mut colors: Vec<String> = cm.colors().to_vec();
    colors.remove(v);
    if ranked.iter().enumerate().all(|(i, &(_, r))| i == r) {
        let mut pi = vec![0; kept.len()];
        let mut alpha = vec![0; kept.len()];
        for &e in &kept {
            pi[new_label[e]] = new_label[m.pi().apply(e)];
            alpha[new_label[e]] = if rank[e].is_some() {
                new_label[e]
            } else {
                new_label[m.alpha().apply(e)]
            };
        }
        let map = CombMap::new(Permutation::from_images(pi)?, Permutation::from_images(alpha)?, MapKind::Map)?;
        return ColoredMap::new(map, colors);
    }
    let (degrees, links) = m.slots();
    let mut flat = vec![0; m.edge_count()];
    let mut acc = 0;
    for legs in m.vertices() {
        for &e in legs {
            flat[e] = acc;
            acc += 1;
        }
    }
    let removed_start = flat[legs[0]];
    let shift = |s: usize| if s > removed_start { s - p } else { s };
    let mut new_degrees = degrees.clone();
    new_degrees.remove(v);
    let mut new_links = Vec::with_capacity(acc - p);
    for legs_w in m.vertices().iter().enumerate().filter(|(w, _)| *w != v).map(|(_, l)| l) {
        for &e in legs_w {
            new_links.push(match rank[e] {
                Some(r) => SlotLink::Boundary(r),
                None => match links[flat[e]] {
                    SlotLink::To(t) => SlotLink::To(shift(t)),
                    b => b,
                },
            });
        }
    }
    ColoredMap::from_slots(&new_degrees, &new_links, &colors, MapKind::Map)
}

/// `m.σ`: the boundary of rank k moves to rank `σ(k)`.
pub fn permute_boundary(cm: &ColoredMap, sigma: &Permutation) -> Result<ColoredMap> {
    let m = cm.map();
    if sigma.len() != m.boundary_count() {
        return Err(Error::Arity(format!(
            "permutation of {} boundaries applied to {}",
            sigma.len(),
            m.boundary_count()
        )));
    }
    let (degrees, links) = m.slots();
    let links: Vec<SlotLink> = links
        .into_iter()
        .map(|l| match l {
            SlotLink::Boundary(r) => SlotLink::Boundary(sigma.apply(r)),
            other => other,
        })
        .collect();
    ColoredMap::from_slots(&degrees, &links, cm.colors(), m.kind())
}

/// `m ∘ (m_1, .., m_k)`: vertex j of `m` is replaced by `parts[j]`, whose
/// boundary of rank i takes the place of leg i.
pub fn compose(m: &CombMap, parts: &[ColoredMap]) -> Result<ColoredMap> {
    if m.kind() != MapKind::Map {
        return Err(Error::Unsupported("substitution into a hyper-map".into()));
    }
    if parts.len() != m.vertex_count() {
        return Err(Error::Arity(format!(
            "{} parts for {} vertices",
            parts.len(),
            m.vertex_count()
        )));
    }
    let mut offset = Vec::with_capacity(parts.len());
    let mut boundary_slot: Vec<Vec<usize>> = Vec::with_capacity(parts.len());
    let mut slot_links: Vec<Vec<SlotLink>> = Vec::with_capacity(parts.len());
    let mut degrees = Vec::new();
    let mut colors = Vec::new();
    let mut acc = 0;
    for (j, part) in parts.iter().enumerate() {
        let pm = part.map();
        if pm.boundary_count() != m.degree(j) {
            return Err(Error::Arity(format!(
                "part {j} has {} boundaries, vertex has degree {}",
                pm.boundary_count(),
                m.degree(j)
            )));
        }
        let (d, l) = pm.slots();
        let mut slots = vec![usize::MAX; pm.boundary_count()];
        for (s, link) in l.iter().enumerate() {
            if let SlotLink::Boundary(r) = link {
                slots[*r] = acc + s;
            }
        }
        offset.push(acc);
        boundary_slot.push(slots);
        acc += pm.edge_count();
        degrees.extend(d);
        slot_links.push(l);
        colors.extend(part.colors().iter().cloned());
    }
    let mut links = Vec::with_capacity(acc);
    for (j, l) in slot_links.iter().enumerate() {
        for link in l {
            links.push(match *link {
                SlotLink::To(t) => SlotLink::To(offset[j] + t),
                SlotLink::Boundary(r) => {
                    let e = m.legs(j)[r];
                    let a = m.alpha().apply(e);
                    if a == e {
                        SlotLink::Boundary(m.boundary_rank(e).expect("fixed point is a boundary"))
                    } else {
                        SlotLink::To(boundary_slot[m.vertex_of(a)][m.leg_of(a)])
                    }
                }
            });
        }
    }
    ColoredMap::from_slots(&degrees, &links, &colors, MapKind::Map)
}

/// Endpoint of a wire in [`rewire`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    /// A directed edge of the input map.
    Edge(usize),
    /// An auxiliary pass-through node.
    Node(usize),
}

/// Rebuild a map from an explicit list of wires.
///
/// Edges of `removed` vertices and auxiliary nodes are pass-through points and
/// must be hit by exactly two wire ends. Each kept edge is hit at most once; an
/// unwired kept edge becomes a boundary. Chains are followed to their kept
/// ends. Returns the new map (kept labels compressed in order) and the number
/// of closed loops made only of pass-through points.
pub fn rewire(cm: &ColoredMap, removed: &[usize], wires: &[(End, End)]) -> Result<(ColoredMap, usize)> {
    let m = cm.map();
    let n = m.edge_count();
    let mut is_removed = vec![false; m.vertex_count()];
    for &v in removed {
        is_removed[v] = true;
    }
    let node_count = wires
        .iter()
        .flat_map(|(a, b)| [a, b])
        .filter_map(|e| match e {
            End::Node(i) => Some(i + 1),
            End::Edge(_) => None,
        })
        .max()
        .unwrap_or(0);
    let id = |e: End| match e {
        End::Edge(h) => h,
        End::Node(i) => n + i,
    };
    let total = n + node_count;
    let pass = |x: usize| x >= n || is_removed[m.vertex_of(x)];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (w, &(a, b)) in wires.iter().enumerate() {
        for e in [a, b] {
            let x = id(e);
            if x >= total || (e == End::Edge(x) && x >= n) {
                return Err(Error::Precondition(format!("wire end {x} out of range")));
            }
            incident[x].push(w);
        }
    }
    for (x, inc) in incident.iter().enumerate() {
        let want_pass = pass(x);
        if want_pass && !inc.is_empty() && inc.len() != 2 {
            return Err(Error::Precondition(format!(
                "pass-through point {x} has {} wire ends",
                inc.len()
            )));
        }
        if want_pass && x < n && inc.len() != 2 {
            return Err(Error::Precondition(format!("removed edge {} is not wired through", x + 1)));
        }
        if !want_pass && inc.len() > 1 {
            return Err(Error::Precondition(format!("kept edge {} wired twice", x + 1)));
        }
    }
    let other = |w: usize, x: usize| {
        let (a, b) = wires[w];
        if id(a) == x {
            id(b)
        } else {
            id(a)
        }
    };
    let mut used = vec![false; wires.len()];
    let mut partner: Vec<usize> = (0..n).collect();
    for h in 0..n {
        if pass(h) || incident[h].is_empty() || used[incident[h][0]] {
            continue;
        }
        let mut w = incident[h][0];
        let mut x = h;
        loop {
            used[w] = true;
            let y = other(w, x);
            if !pass(y) {
                partner[h] = y;
                partner[y] = h;
                break;
            }
            let inc = &incident[y];
            let next = if inc[0] == w && !used[inc[1]] {
                inc[1]
            } else if inc[1] == w && !used[inc[0]] {
                inc[0]
            } else {
                return Err(Error::Precondition("inconsistent wiring".into()));
            };
            x = y;
            w = next;
        }
    }
    // Remaining wires form closed loops through pass-through points.
    let mut loops = 0;
    for start in 0..wires.len() {
        if used[start] {
            continue;
        }
        loops += 1;
        let mut w = start;
        let mut x = id(wires[w].0);
        loop {
            used[w] = true;
            let y = other(w, x);
            let inc = &incident[y];
            let next = if !used[inc[0]] {
                inc[0]
            } else if inc.len() > 1 && !used[inc[1]] {
                inc[1]
            } else {
                break;
            };
            x = y;
            w = next;
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&e| !pass(e)).collect();
    let mut new_label = vec![usize::MAX; n];
    for (i, &e) in kept.iter().enumerate() {
        new_label[e] = i;
    }
    let mut pi = vec![0; kept.len()];
    let mut alpha = vec![0; kept.len()];
    for &e in &kept {
        pi[new_label[e]] = new_label[m.pi().apply(e)];
        alpha[new_label[e]] = new_label[partner[e]];
    }
    let map = CombMap::new(Permutation::from_images(pi)?, Permutation::from_images(alpha)?, MapKind::Map)?;
    let colors = cm
        .colors()
        .iter()
        .enumerate()
        .filter(|(v, _)| !is_removed[*v])
        .map(|(_, c)| c.clone())
        .collect();
    Ok((ColoredMap::new(map, colors)?, loops))
}

/// The wires of `alpha` itself, one per edge (boundaries contribute none).
pub fn alpha_wires(m: &CombMap) -> Vec<(End, End)> {
    (0..m.edge_count())
        .filter(|&e| m.alpha().apply(e) > e)
        .map(|e| (End::Edge(e), End::Edge(m.alpha().apply(e))))
        .collect()
}

//! The switch poset on closed maps sharing a vertex permutation.
//!
//! `n < m` when `n` is reached from `m` by a chain of switches that each
//! increase the number of connected components. Elements are identified by
//! their `alpha`.

mod hat;
mod melonic;

pub use hat::{hat_maps, satisfies_p1, HatConfig};
pub use melonic::{fuss_catalan, is_melonic, melonic_census, melonic_trees, CensusRow};

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, RwLock};

use crate::combmap::{CombMap, MapKind, Permutation};
use crate::error::{Error, Result};

/// One switch away from a map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Switch {
    pub map: CombMap,
    /// `gamma(new) - gamma(old)`.
    pub delta_gamma: i32,
    /// The two edges that were replaced, as directed-edge pairs.
    pub replaced: [(usize, usize); 2],
}

fn require_closed(m: &CombMap) -> Result<()> {
    if m.kind() != MapKind::Map {
        return Err(Error::Unsupported("switches on hyper-maps".into()));
    }
    if !m.is_closed() {
        return Err(Error::Precondition(format!(
            "switches need a closed map, found {} boundaries",
            m.boundary_count()
        )));
    }
    Ok(())
}

fn edge_pairs(m: &CombMap) -> Vec<(usize, usize)> {
    (0..m.edge_count())
        .filter_map(|e| {
            let a = m.alpha().apply(e);
            (a > e).then_some((e, a))
        })
        .collect()
}

fn switched(m: &CombMap, x: (usize, usize), y: (usize, usize)) -> CombMap {
    let mut alpha = m.alpha().images().to_vec();
    alpha[x.0] = x.1;
    alpha[x.1] = x.0;
    alpha[y.0] = y.1;
    alpha[y.1] = y.0;
    m.with_alpha(Permutation::from_images(alpha).expect("switch keeps an involution"))
        .expect("switch keeps a valid map")
}

/// All maps one switch away, each with its change in component count.
pub fn covering_switches(m: &CombMap) -> Result<Vec<Switch>> {
    require_closed(m)?;
    let gamma = m.gamma() as i32;
    let edges = edge_pairs(m);
    let mut out = Vec::new();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, a2) = edges[i];
            let (b, b2) = edges[j];
            for (x, y) in [((a, b), (a2, b2)), ((a, b2), (a2, b))] {
                let map = switched(m, x, y);
                let delta_gamma = map.gamma() as i32 - gamma;
                out.push(Switch {
                    map,
                    delta_gamma,
                    replaced: [edges[i], edges[j]],
                });
            }
        }
    }
    Ok(out)
}

/// Switches that increase the component count (the lower covers of `m`).
pub fn disconnecting_switches(m: &CombMap) -> Result<Vec<Switch>> {
    Ok(covering_switches(m)?
        .into_iter()
        .filter(|s| s.delta_gamma == 1)
        .collect())
}

/// `m1 <= m2` in the switch order.
pub fn leq(m1: &CombMap, m2: &CombMap) -> Result<bool> {
    SwitchPosetView::new(m2.pi().clone()).leq(m1, m2)
}

/// The unique minimal map below an even-degree map, by repeated
/// disconnecting switches.
pub fn minimal_map(m: &CombMap) -> Result<CombMap> {
    require_closed(m)?;
    if !m.all_degrees_even() {
        return Err(Error::Unsupported(
            "minimal map of a map with odd-degree vertices (not unique)".into(),
        ));
    }
    let mut current = m.clone();
    while let Some(s) = first_disconnecting(&current) {
        current = s;
    }
    Ok(current)
}

fn first_disconnecting(m: &CombMap) -> Option<CombMap> {
    let gamma = m.gamma();
    let edges = edge_pairs(m);
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, a2) = edges[i];
            let (b, b2) = edges[j];
            for (x, y) in [((a, b), (a2, b2)), ((a, b2), (a2, b))] {
                let map = switched(m, x, y);
                if map.gamma() > gamma {
                    return Some(map);
                }
            }
        }
    }
    None
}

/// A closed interval `[bottom, top]` of the switch poset.
#[derive(Clone, Debug)]
pub struct Interval {
    elements: Vec<CombMap>,
    index: HashMap<Vec<usize>, usize>,
    /// `below[i][j]`: element i <= element j.
    below: Vec<Vec<bool>>,
    moebius_top: Vec<i64>,
    bottom: usize,
}

impl Interval {
    /// Elements ordered by component count; index 0 is the top.
    pub fn elements(&self) -> &[CombMap] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn top(&self) -> &CombMap {
        &self.elements[0]
    }

    pub fn bottom(&self) -> &CombMap {
        &self.elements[self.bottom]
    }

    pub fn index_of(&self, m: &CombMap) -> Option<usize> {
        self.index.get(m.alpha().images()).copied()
    }

    /// Order test between two elements of the interval.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.below[i][j]
    }

    /// `mu(element i, top)`.
    pub fn moebius_to_top(&self, i: usize) -> i64 {
        self.moebius_top[i]
    }

    /// `mu(element i, element j)` for any two elements.
    pub fn moebius(&self, i: usize, j: usize) -> i64 {
        if !self.below[i][j] {
            return 0;
        }
        // mu(z, j) for z in [i, j], processed from j downward
        let mut order: Vec<usize> = (0..self.len())
            .filter(|&z| self.below[i][z] && self.below[z][j])
            .collect();
        order.sort_by_key(|&z| self.elements[z].gamma());
        let mut mu: HashMap<usize, i64> = HashMap::new();
        for &z in &order {
            let v = if z == j {
                1
            } else {
                -order
                    .iter()
                    .filter(|&&w| w != z && self.below[z][w])
                    .filter_map(|w| mu.get(w))
                    .sum::<i64>()
            };
            mu.insert(z, v);
        }
        mu[&i]
    }
}

type Key = Vec<usize>;

/// Memoized order structure over the maps sharing one `pi`.
///
/// Safe to share between threads; memo inserts are serialized.
#[derive(Debug)]
pub struct SwitchPosetView {
    pi: Permutation,
    covers: RwLock<HashMap<Key, Arc<Vec<Key>>>>,
    intervals: RwLock<HashMap<(Key, Key), Arc<Interval>>>,
}

impl SwitchPosetView {
    pub fn new(pi: Permutation) -> Self {
        SwitchPosetView {
            pi,
            covers: RwLock::new(HashMap::new()),
            intervals: RwLock::new(HashMap::new()),
        }
    }

    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    fn check(&self, m: &CombMap) -> Result<()> {
        if m.pi() != &self.pi {
            return Err(Error::Precondition("maps do not share the same pi".into()));
        }
        require_closed(m)
    }

    fn map_of(&self, alpha: &[usize]) -> CombMap {
        CombMap::new(
            self.pi.clone(),
            Permutation::from_images(alpha.to_vec()).expect("stored alpha is a permutation"),
            MapKind::Map,
        )
        .expect("stored map is valid")
    }

    /// Alphas of the lower covers of the map with this alpha.
    fn lower_covers(&self, alpha: &[usize]) -> Arc<Vec<Key>> {
        if let Some(c) = self.covers.read().expect("memo lock").get(alpha) {
            return c.clone();
        }
        let m = self.map_of(alpha);
        let mut keys: Vec<Key> = disconnecting_switches(&m)
            .expect("stored maps are closed")
            .into_iter()
            .map(|s| s.map.alpha().images().to_vec())
            .collect();
        keys.sort();
        keys.dedup();
        let keys = Arc::new(keys);
        self.covers
            .write()
            .expect("memo lock")
            .insert(alpha.to_vec(), keys.clone());
        keys
    }

    pub fn lower_cover_maps(&self, m: &CombMap) -> Result<Vec<CombMap>> {
        self.check(m)?;
        Ok(self
            .lower_covers(m.alpha().images())
            .iter()
            .map(|k| self.map_of(k))
            .collect())
    }

    pub fn leq(&self, m1: &CombMap, m2: &CombMap) -> Result<bool> {
        self.check(m1)?;
        self.check(m2)?;
        let target = m1.alpha().images();
        let target_gamma = m1.gamma();
        if m2.gamma() > target_gamma {
            return Ok(false);
        }
        let mut seen: HashSet<Key> = HashSet::new();
        let mut queue = VecDeque::from([(m2.alpha().images().to_vec(), m2.gamma())]);
        while let Some((a, g)) = queue.pop_front() {
            if a == target {
                return Ok(true);
            }
            if g >= target_gamma {
                continue;
            }
            for c in self.lower_covers(&a).iter() {
                if seen.insert(c.clone()) {
                    queue.push_back((c.clone(), g + 1));
                }
            }
        }
        Ok(false)
    }

    /// The interval `[m0, m]` with Möbius values toward the top.
    pub fn interval(&self, m0: &CombMap, m: &CombMap) -> Result<Arc<Interval>> {
        self.check(m0)?;
        self.check(m)?;
        let key = (m0.alpha().images().to_vec(), m.alpha().images().to_vec());
        if let Some(iv) = self.intervals.read().expect("memo lock").get(&key) {
            return Ok(iv.clone());
        }
        // down-set of m with cover edges
        let mut down: Vec<Key> = vec![key.1.clone()];
        let mut pos: HashMap<Key, usize> = HashMap::from([(key.1.clone(), 0)]);
        let mut children: Vec<Vec<usize>> = vec![Vec::new()];
        let mut head = 0;
        while head < down.len() {
            let covers = self.lower_covers(&down[head]);
            for c in covers.iter() {
                let idx = *pos.entry(c.clone()).or_insert_with(|| {
                    down.push(c.clone());
                    children.push(Vec::new());
                    down.len() - 1
                });
                children[head].push(idx);
            }
            head += 1;
        }
        let bottom_pos = *pos.get(&key.0).ok_or_else(|| {
            Error::Precondition("lower endpoint is not below the upper endpoint".into())
        })?;
        // up-set of m0 within the down-set
        let mut parents: Vec<Vec<usize>> = vec![Vec::new(); down.len()];
        for (p, cs) in children.iter().enumerate() {
            for &c in cs {
                parents[c].push(p);
            }
        }
        let mut inside = vec![false; down.len()];
        inside[bottom_pos] = true;
        let mut stack = vec![bottom_pos];
        while let Some(x) = stack.pop() {
            for &p in &parents[x] {
                if !inside[p] {
                    inside[p] = true;
                    stack.push(p);
                }
            }
        }
        let mut members: Vec<usize> = (0..down.len()).filter(|&i| inside[i]).collect();
        let maps: Vec<CombMap> = down.iter().map(|k| self.map_of(k)).collect();
        members.sort_by_key(|&i| (maps[i].gamma(), i));
        let local: HashMap<usize, usize> = members.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let n = members.len();
        let mut below = vec![vec![false; n]; n];
        for (li, &gi) in members.iter().enumerate() {
            // everything reachable downward from gi, inside the interval
            let mut stack = vec![gi];
            below[li][li] = true;
            let mut seen = vec![false; down.len()];
            seen[gi] = true;
            while let Some(x) = stack.pop() {
                for &c in &children[x] {
                    if inside[c] && !seen[c] {
                        seen[c] = true;
                        below[local[&c]][li] = true;
                        stack.push(c);
                    }
                }
            }
        }
        let mut moebius_top = vec![0i64; n];
        for i in 0..n {
            moebius_top[i] = if i == 0 {
                1
            } else {
                -(0..i).filter(|&z| below[i][z]).map(|z| moebius_top[z]).sum::<i64>()
            };
        }
        let elements: Vec<CombMap> = members.iter().map(|&g| maps[g].clone()).collect();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.alpha().images().to_vec(), i))
            .collect();
        let iv = Arc::new(Interval {
            bottom: local[&bottom_pos],
            elements,
            index,
            below,
            moebius_top,
        });
        self.intervals
            .write()
            .expect("memo lock")
            .insert(key, iv.clone());
        Ok(iv)
    }

    pub fn moebius(&self, n: &CombMap, m: &CombMap) -> Result<i64> {
        let iv = self.interval(n, m)?;
        Ok(iv.moebius_to_top(iv.bottom))
    }

    /// Meet and join of `m1`, `m2` inside `[minimal(m), m]`.
    pub fn meet_join(&self, m1: &CombMap, m2: &CombMap, m: &CombMap) -> Result<(CombMap, CombMap)> {
        let m0 = minimal_map(m)?;
        let iv = self.interval(&m0, m)?;
        let i1 = iv
            .index_of(m1)
            .ok_or_else(|| Error::Precondition("first map is not below the ambient map".into()))?;
        let i2 = iv
            .index_of(m2)
            .ok_or_else(|| Error::Precondition("second map is not below the ambient map".into()))?;
        let lower: Vec<usize> = (0..iv.len()).filter(|&x| iv.leq(x, i1) && iv.leq(x, i2)).collect();
        let upper: Vec<usize> = (0..iv.len()).filter(|&x| iv.leq(i1, x) && iv.leq(i2, x)).collect();
        let meet = lower
            .iter()
            .copied()
            .find(|&x| lower.iter().all(|&y| iv.leq(y, x)))
            .ok_or_else(|| Error::Precondition("no greatest lower bound".into()))?;
        let join = upper
            .iter()
            .copied()
            .find(|&x| upper.iter().all(|&y| iv.leq(x, y)))
            .ok_or_else(|| Error::Precondition("no least upper bound".into()))?;
        Ok((iv.elements()[meet].clone(), iv.elements()[join].clone()))
    }
}

/// `[m0, m]` using a throwaway view.
pub fn interval(m0: &CombMap, m: &CombMap) -> Result<Arc<Interval>> {
    SwitchPosetView::new(m.pi().clone()).interval(m0, m)
}

/// `mu(n, m)` using a throwaway view.
pub fn moebius(n: &CombMap, m: &CombMap) -> Result<i64> {
    SwitchPosetView::new(m.pi().clone()).moebius(n, m)
}

pub fn lattice_meet_join(m1: &CombMap, m2: &CombMap, m: &CombMap) -> Result<(CombMap, CombMap)> {
    SwitchPosetView::new(m.pi().clone()).meet_join(m1, m2, m)
}

//! Orthogonal Weingarten calculus and the Haar Schwinger-Dyson identity.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::gaussian::closed_value;
use super::{monte_carlo, MomentEstimate, SampleStats};
use crate::combmap::{alpha_wires, involutions, rewire, ColoredMap, End};
use crate::error::{Error, Result};
use crate::randgen::{haar_orthogonal, purpose, SeedStream};
use crate::tensoreval::DenseTensor;

/// Perfect matchings of `0..k`.
pub fn pairings(k: usize) -> Vec<Vec<(usize, usize)>> {
    involutions(k, false)
}

/// Cycles of the union of two perfect matchings.
fn loops(p: &[(usize, usize)], q: &[(usize, usize)], k: usize) -> usize {
    let mut mate_p = vec![0; k];
    let mut mate_q = vec![0; k];
    for &(a, b) in p {
        mate_p[a] = b;
        mate_p[b] = a;
    }
    for &(a, b) in q {
        mate_q[a] = b;
        mate_q[b] = a;
    }
    let mut seen = vec![false; k];
    let mut count = 0;
    for s in 0..k {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut x = s;
        loop {
            seen[x] = true;
            let y = mate_p[x];
            seen[y] = true;
            x = mate_q[y];
            if x == s {
                break;
            }
        }
    }
    count
}

/// Orthogonal Weingarten matrix on the pairings of `0..k`.
#[derive(Clone, Debug)]
pub struct WeingartenTable {
    pub k: usize,
    pub n: usize,
    pub pairings: Vec<Vec<(usize, usize)>>,
    /// `N^{loops(p, q)}`.
    pub gram: DMatrix<f64>,
    pub wg: DMatrix<f64>,
    loops: Vec<Vec<usize>>,
}

impl WeingartenTable {
    pub fn len(&self) -> usize {
        self.pairings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairings.is_empty()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.wg[(i, j)]
    }

    pub fn loops(&self, i: usize, j: usize) -> usize {
        self.loops[i][j]
    }

    /// Half the permutation length of `p q^{-1}`: k/2 minus the loops.
    pub fn length(&self, i: usize, j: usize) -> usize {
        self.k / 2 - self.loops[i][j]
    }

    /// `Wg(p, q) (-1)^{|σ|} N^{k/2 + |σ|}`, which tends to one.
    pub fn asymptotic_ratio(&self, i: usize, j: usize) -> f64 {
        let s = self.length(i, j);
        let sign = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
        self.wg[(i, j)] * sign * (self.n as f64).powi((self.k / 2 + s) as i32)
    }

    /// `max |Gram · Wg - I|`.
    pub fn identity_error(&self) -> f64 {
        let prod = &self.gram * &self.wg;
        let mut err: f64 = 0.0;
        for i in 0..self.len() {
            for j in 0..self.len() {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((prod[(i, j)] - target).abs());
            }
        }
        err
    }
}

/// Inverts the pairing Gram matrix `N^{loops(p, q)}`.
pub fn weingarten_table(k: usize, n: usize) -> Result<WeingartenTable> {
    if k % 2 == 1 {
        return Err(Error::Precondition(format!("Weingarten tables need even k, got {k}")));
    }
    if k > 6 {
        return Err(Error::Unsupported(format!("Weingarten tables beyond k = 6 (got {k})")));
    }
    let pairings = pairings(k);
    let size = pairings.len();
    let loops: Vec<Vec<usize>> = pairings
        .iter()
        .map(|p| pairings.iter().map(|q| loops(p, q, k)).collect())
        .collect();
    let gram = DMatrix::from_fn(size, size, |i, j| (n as f64).powi(loops[i][j] as i32));
    let wg = gram
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Precondition(format!("singular Gram matrix for k = {k}, N = {n}")))?;
    let table = WeingartenTable {
        k,
        n,
        pairings,
        gram,
        wg,
        loops,
    };
    let err = table.identity_error();
    if err.is_nan() || err >= 1e-8 {
        return Err(Error::Precondition(format!("singular Gram matrix for k = {k}, N = {n}")));
    }
    Ok(table)
}

fn haar_vertices(cm: &ColoredMap, u_color: &str) -> Result<Vec<usize>> {
    let us: Vec<usize> = (0..cm.map().vertex_count()).filter(|&v| cm.color(v) == u_color).collect();
    if us.iter().any(|&v| cm.map().degree(v) != 2) {
        return Err(Error::Arity(format!("color `{u_color}` must label degree-2 vertices")));
    }
    Ok(us)
}

/// Exact Haar expectation of a closed map whose `u_color` vertices carry
/// one Haar orthogonal matrix and whose other colors are fixed tensors.
pub fn exact_haar_moment(
    cm: &ColoredMap,
    n: usize,
    u_color: &str,
    fixed: &HashMap<String, DenseTensor>,
) -> Result<MomentEstimate> {
    let m = cm.map();
    if !m.is_closed() {
        return Err(Error::Precondition("moments are defined on closed maps".into()));
    }
    let us = haar_vertices(cm, u_color)?;
    let k = us.len();
    if k > 6 {
        return Err(Error::Capacity(format!("{k} Haar vertices (at most 6)")));
    }
    if k % 2 == 1 {
        return Ok(MomentEstimate::exact(cm, Some(n), 0.0));
    }
    let table = weingarten_table(k, n)?;
    let base = alpha_wires(m);
    let nf = n as f64;
    // Contracted value for each (row pairing, column pairing).
    let mut contracted = vec![vec![0.0; table.len()]; table.len()];
    for (i, p) in table.pairings.iter().enumerate() {
        for (j, q) in table.pairings.iter().enumerate() {
            let mut wires = base.clone();
            for &(a, b) in p {
                wires.push((End::Edge(m.legs(us[a])[0]), End::Edge(m.legs(us[b])[0])));
            }
            for &(a, b) in q {
                wires.push((End::Edge(m.legs(us[a])[1]), End::Edge(m.legs(us[b])[1])));
            }
            let (rest, free) = rewire(cm, &us, &wires)?;
            let gamma = rest.map().gamma() as i32;
            contracted[i][j] = nf.powi(free as i32 + gamma) * closed_value(&rest, fixed)?;
        }
    }
    let mut total = 0.0;
    for (i, row) in contracted.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            total += table.value(i, j) * c;
        }
    }
    Ok(MomentEstimate::exact(cm, Some(n), total * nf.powi(-(m.gamma() as i32))))
}

/// One term `(m.σ)^v` of the Haar Schwinger-Dyson identity.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarSdTerm {
    pub vertex: usize,
    /// Whether σ swaps the two boundaries.
    pub swapped: bool,
    /// `(-1)^{|σ|}`.
    pub sign: i32,
    pub map: ColoredMap,
    /// Identity loops created when the second leg of v is a boundary.
    pub loops: usize,
}

impl HaarSdTerm {
    /// `N^{γ(v,σ)} E_N[(m.σ)^v]` on one realization: the unnormalized
    /// contraction, each identity loop contributing N.
    pub fn contraction(&self, n: usize, tensors: &HashMap<String, DenseTensor>) -> Result<f64> {
        let nf = n as f64;
        let gamma = self.map.map().gamma() + self.loops;
        Ok(nf.powi(gamma as i32) * closed_value(&self.map, tensors)?)
    }
}

/// Terms of Σ_{v, σ} (-1)^{|σ|} N^{γ(v,σ)} E_N[(m.σ)^v] for a map with two
/// boundaries: v runs over the `u_color` vertices and σ over S_2.
pub fn haar_sd_terms(cm: &ColoredMap, u_color: &str) -> Result<Vec<HaarSdTerm>> {
    let m = cm.map();
    if m.boundary_count() != 2 {
        return Err(Error::Precondition(format!(
            "the Haar identity needs exactly two boundaries, found {}",
            m.boundary_count()
        )));
    }
    let us = haar_vertices(cm, u_color)?;
    // Boundary of rank r is tied to terminal node r.
    let mut base = alpha_wires(m);
    for (r, &e) in m.boundary().iter().enumerate() {
        base.push((End::Edge(e), End::Node(r)));
    }
    let mut terms = Vec::new();
    for &v in &us {
        let f2 = m.legs(v)[1];
        let cut = base
            .iter()
            .position(|&(a, b)| a == End::Edge(f2) || b == End::Edge(f2))
            .expect("every edge is wired");
        let (a, b) = base[cut];
        let neighbor = if a == End::Edge(f2) { b } else { a };
        for swapped in [false, true] {
            let (first, second) = if swapped { (1, 0) } else { (0, 1) };
            let mut wires = base.clone();
            wires.remove(cut);
            wires.push((End::Edge(f2), End::Node(first)));
            wires.push((neighbor, End::Node(second)));
            let (map, loops) = rewire(cm, &[], &wires)?;
            terms.push(HaarSdTerm {
                vertex: v,
                swapped,
                sign: if swapped { -1 } else { 1 },
                map,
                loops,
            });
        }
    }
    Ok(terms)
}

/// Monte Carlo estimate of the Haar Schwinger-Dyson sum on shared draws,
/// divided by the largest |term|.
pub fn haar_residual(
    cm: &ColoredMap,
    u_color: &str,
    fixed: &HashMap<String, DenseTensor>,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<MomentEstimate> {
    let terms = haar_sd_terms(cm, u_color)?;
    let stream = SeedStream::new(seed);
    let stats = monte_carlo(samples, 1 + terms.len(), |i| {
        let mut rng = stream.rng(purpose::HAAR, i);
        let mut tensors = fixed.clone();
        tensors.insert(u_color.to_string(), haar_orthogonal(n, &mut rng));
        let mut row = vec![0.0];
        for t in &terms {
            let x = t.contraction(n, &tensors)?;
            row[0] += t.sign as f64 * x;
            row.push(x);
        }
        Ok(row)
    })?;
    let scale = stats[1..].iter().map(|s| s.mean.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Precondition("every Schwinger-Dyson term vanishes".into()));
    }
    let normalized = SampleStats {
        mean: stats[0].mean / scale,
        stderr: stats[0].stderr / scale,
        variance: stats[0].variance / (scale * scale),
        samples,
    };
    Ok(MomentEstimate::sampled(cm, n, normalized, seed))
}

//! Greedy pairwise contraction plans for trace invariants.

use super::tensor::{checked_size, DenseTensor};
use crate::combmap::CombMap;
use crate::error::{Error, Result};

/// One elimination step. Factors `0..V` are the vertex tensors; each step
/// creates the next factor id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// Take diagonals over repeated labels and sum out labels not in `out`.
    Reduce { factor: usize, out: Vec<usize> },
    /// Contract two factors, keeping the labels in `out`.
    Merge { left: usize, right: usize, out: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionPlan {
    vertex_labels: Vec<Vec<usize>>,
    outputs: Vec<usize>,
    steps: Vec<Step>,
    /// Number of distinct labels each step loops over.
    loop_sizes: Vec<usize>,
    peak_exponent: usize,
    /// Components to normalize by (closed maps only).
    gamma: Option<usize>,
}

/// One summation label per alpha-cycle; boundaries get their own label.
fn labels_of(m: &CombMap) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut label = vec![usize::MAX; m.edge_count()];
    for (next, cycle) in m.alpha().cycles().into_iter().enumerate() {
        for e in cycle {
            label[e] = next;
        }
    }
    let vertex_labels = m
        .vertices()
        .iter()
        .map(|legs| legs.iter().map(|&e| label[e]).collect())
        .collect();
    let outputs = m.boundary().iter().map(|&e| label[e]).collect();
    (vertex_labels, outputs)
}

fn distinct(labels: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for &l in labels {
        if !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

impl ContractionPlan {
    /// Greedy plan: repeatedly merge the pair of factors sharing a label whose
    /// result has the fewest labels.
    pub fn new(m: &CombMap) -> Self {
        let (vertex_labels, outputs) = labels_of(m);
        let mut live: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut steps = Vec::new();
        let mut loop_sizes = Vec::new();
        let mut next_id = vertex_labels.len();
        let mut peak = 0;
        // labels still needed by factors other than `skip`, or as outputs
        let needed = |live: &[(usize, Vec<usize>)], skip: &[usize], l: usize, outputs: &[usize]| {
            outputs.contains(&l)
                || live
                    .iter()
                    .any(|(id, ls)| !skip.contains(id) && ls.contains(&l))
        };
        let all: Vec<(usize, Vec<usize>)> = vertex_labels.iter().cloned().enumerate().collect();
        for (id, labels) in &all {
            let keep: Vec<usize> = distinct(labels)
                .into_iter()
                .filter(|&l| needed(&all, &[*id], l, &outputs))
                .collect();
            if keep != *labels {
                loop_sizes.push(distinct(labels).len());
                steps.push(Step::Reduce {
                    factor: *id,
                    out: keep.clone(),
                });
                peak = peak.max(keep.len());
                live.push((next_id, keep));
                next_id += 1;
            } else {
                live.push((*id, labels.clone()));
            }
        }
        while live.len() > 1 {
            let mut best: Option<(usize, usize, usize, usize, Vec<usize>)> = None;
            for i in 0..live.len() {
                for j in i + 1..live.len() {
                    let shares = live[i].1.iter().any(|l| live[j].1.contains(l));
                    let union = distinct(&[live[i].1.clone(), live[j].1.clone()].concat());
                    let out: Vec<usize> = union
                        .iter()
                        .copied()
                        .filter(|&l| needed(&live, &[live[i].0, live[j].0], l, &outputs))
                        .collect();
                    let score = (usize::from(!shares), out.len(), union.len());
                    let better = match &best {
                        None => true,
                        Some((bi, bj, bo, bu, _)) => {
                            let bshares = live[*bi].1.iter().any(|l| live[*bj].1.contains(l));
                            score < (usize::from(!bshares), *bo, *bu)
                        }
                    };
                    if better {
                        best = Some((i, j, out.len(), union.len(), out));
                    }
                }
            }
            let (i, j, _, union, out) = best.expect("at least two factors");
            let (left, right) = (live[i].0, live[j].0);
            loop_sizes.push(union);
            peak = peak.max(out.len());
            steps.push(Step::Merge {
                left,
                right,
                out: out.clone(),
            });
            live.remove(j);
            live.remove(i);
            live.push((next_id, out));
            next_id += 1;
        }
        if let Some((id, labels)) = live.first() {
            if labels != &outputs {
                loop_sizes.push(labels.len());
                steps.push(Step::Reduce {
                    factor: *id,
                    out: outputs.clone(),
                });
            }
        }
        ContractionPlan {
            vertex_labels,
            outputs,
            steps,
            loop_sizes,
            peak_exponent: peak,
            gamma: m.is_closed().then(|| m.gamma()),
        }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Largest intermediate is `N^peak_exponent` entries.
    pub fn peak_exponent(&self) -> usize {
        self.peak_exponent
    }

    /// Multiply-adds needed at dimension `n`.
    pub fn flops(&self, n: usize) -> f64 {
        self.loop_sizes.iter().map(|&k| (n as f64).powi(k as i32)).sum()
    }

    pub fn merge_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Merge { .. })).count()
    }

    fn check_inputs(&self, tensors: &[&DenseTensor]) -> Result<usize> {
        if tensors.len() != self.vertex_labels.len() {
            return Err(Error::Arity(format!(
                "{} tensors for {} vertices",
                tensors.len(),
                self.vertex_labels.len()
            )));
        }
        let n = tensors.first().map_or(1, |t| t.dim());
        for (v, (t, labels)) in tensors.iter().zip(&self.vertex_labels).enumerate() {
            if t.order() != labels.len() {
                return Err(Error::Arity(format!(
                    "vertex {v} has degree {} but its tensor has order {}",
                    labels.len(),
                    t.order()
                )));
            }
            if t.dim() != n {
                return Err(Error::Arity(format!(
                    "vertex {v} tensor has dimension {}, expected {n}",
                    t.dim()
                )));
            }
        }
        Ok(n)
    }

    /// Unnormalized contraction; boundary indices come out in rank order.
    pub fn contract(&self, tensors: &[&DenseTensor]) -> Result<DenseTensor> {
        let n = self.check_inputs(tensors)?;
        let v = self.vertex_labels.len();
        let mut store: Vec<Option<(Vec<usize>, Vec<f64>)>> = Vec::with_capacity(v + self.steps.len());
        let mut last = None;
        for _ in 0..v {
            store.push(None);
        }
        let take = |store: &mut Vec<Option<(Vec<usize>, Vec<f64>)>>, id: usize| -> (Vec<usize>, Vec<f64>) {
            if id < v {
                (self.vertex_labels[id].clone(), tensors[id].data().to_vec())
            } else {
                store[id].take().expect("each factor is consumed once")
            }
        };
        for step in &self.steps {
            let result = match step {
                Step::Reduce { factor, out } => {
                    let (labels, data) = if *factor < v {
                        (self.vertex_labels[*factor].clone(), tensors[*factor].data().to_vec())
                    } else {
                        take(&mut store, *factor)
                    };
                    (out.clone(), einsum(&[(&labels, &data)], out, n)?)
                }
                Step::Merge { left, right, out } => {
                    let (la, da) = take(&mut store, *left);
                    let (lb, db) = take(&mut store, *right);
                    (out.clone(), einsum(&[(&la, &da), (&lb, &db)], out, n)?)
                }
            };
            store.push(Some(result));
            last = Some(store.len() - 1);
        }
        let data = match last {
            Some(id) => store[id].take().expect("final factor").1,
            None if v == 1 => tensors[0].data().to_vec(),
            None => vec![1.0],
        };
        DenseTensor::new(self.outputs.len(), n, data)
    }

    /// Contraction divided by `N^gamma` for closed maps.
    pub fn evaluate(&self, tensors: &[&DenseTensor]) -> Result<DenseTensor> {
        let mut t = self.contract(tensors)?;
        if let Some(g) = self.gamma {
            let n = tensors.first().map_or(1, |t| t.dim()) as f64;
            let scale = n.powi(-(g as i32));
            t.data_mut().iter_mut().for_each(|x| *x *= scale);
        }
        Ok(t)
    }
}

/// Sum over all label assignments of the product of the inputs, indexed by `out`.
pub(crate) fn einsum(inputs: &[(&[usize], &[f64])], out: &[usize], n: usize) -> Result<Vec<f64>> {
    if let [a, b] = inputs {
        return pair_product(*a, *b, out, n);
    }
    einsum_loop(inputs, out, n)
}

/// Two-factor contraction as a batched matrix product. Each factor is first
/// permuted (and reduced over its private labels) into `[batch, kept, shared]`
/// layout; zero rows of the sparser factor are skipped.
fn pair_product(a: (&[usize], &[f64]), b: (&[usize], &[f64]), out: &[usize], n: usize) -> Result<Vec<f64>> {
    let zeros = |d: &[f64]| d.iter().filter(|x| **x == 0.0).count();
    let (a, b) = if zeros(b.1) * a.1.len() > zeros(a.1) * b.1.len() { (b, a) } else { (a, b) };
    let nonzero = a.1.len() - zeros(a.1);
    if nonzero * 8 <= a.1.len() {
        return sparse_product(a, b, out, n);
    }
    let (la, lb) = (distinct(a.0), distinct(b.0));
    let batch: Vec<usize> = out.iter().copied().filter(|l| la.contains(l) && lb.contains(l)).collect();
    let kept_a: Vec<usize> = out.iter().copied().filter(|l| la.contains(l) && !lb.contains(l)).collect();
    let kept_b: Vec<usize> = out.iter().copied().filter(|l| lb.contains(l) && !la.contains(l)).collect();
    let shared: Vec<usize> = la.iter().copied().filter(|l| lb.contains(l) && !out.contains(l)).collect();
    let a_layout = [batch.as_slice(), &kept_a, &shared].concat();
    let b_layout = [batch.as_slice(), &shared, &kept_b].concat();
    let am = einsum_loop(&[a], &a_layout, n)?;
    let bm = einsum_loop(&[b], &b_layout, n)?;
    let (nb, ni, nk, nj) = (
        checked_size(batch.len(), n)?,
        checked_size(kept_a.len(), n)?,
        checked_size(shared.len(), n)?,
        checked_size(kept_b.len(), n)?,
    );
    let work = (nb as u128) * (ni as u128) * (nk as u128) * (nj as u128);
    if work > (1u128 << 40) {
        return Err(Error::Capacity(format!("pairwise contraction of {work} terms")));
    }
    let mut c = vec![0.0; checked_size(batch.len() + kept_a.len() + kept_b.len(), n)?];
    for t in 0..nb {
        for i in 0..ni {
            let row = &mut c[(t * ni + i) * nj..(t * ni + i + 1) * nj];
            for k in 0..nk {
                let w = am[(t * ni + i) * nk + k];
                if w == 0.0 {
                    continue;
                }
                let src = &bm[(t * nk + k) * nj..(t * nk + k + 1) * nj];
                for (r, x) in row.iter_mut().zip(src) {
                    *r += w * x;
                }
            }
        }
    }
    let c_layout = [batch, kept_a, kept_b].concat();
    if c_layout == out {
        return Ok(c);
    }
    einsum_loop(&[(&c_layout, &c)], out, n)
}

/// Scatter-gather contraction driven by the nonzero entries of `a`.
fn sparse_product(a: (&[usize], &[f64]), b: (&[usize], &[f64]), out: &[usize], n: usize) -> Result<Vec<f64>> {
    let stride = |labels: &[usize], l: usize| -> usize {
        let p = labels.len();
        labels
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == l)
            .map(|(k, _)| n.pow((p - 1 - k) as u32))
            .sum()
    };
    let la = distinct(a.0);
    let free_b: Vec<usize> = distinct(b.0).into_iter().filter(|l| !la.contains(l)).collect();
    let free_size = checked_size(free_b.len(), n)?;
    let work = (a.1.len() as u128) * (free_size as u128);
    if work > (1u128 << 40) {
        return Err(Error::Capacity(format!("sparse contraction of {work} terms")));
    }
    // offsets in b and in the result for every assignment of b's own labels
    let fb: Vec<usize> = free_b.iter().map(|&l| stride(b.0, l)).collect();
    let fc: Vec<usize> = free_b.iter().map(|&l| stride(out, l)).collect();
    let mut pairs = Vec::with_capacity(free_size);
    let mut idx = vec![0usize; free_b.len()];
    for _ in 0..free_size {
        let bo: usize = idx.iter().zip(&fb).map(|(i, s)| i * s).sum();
        let co: usize = idx.iter().zip(&fc).map(|(i, s)| i * s).sum();
        pairs.push((bo, co));
        for ax in (0..idx.len()).rev() {
            idx[ax] += 1;
            if idx[ax] < n {
                break;
            }
            idx[ax] = 0;
        }
    }
    let ab: Vec<usize> = la.iter().map(|&l| stride(b.0, l)).collect();
    let ac: Vec<usize> = la.iter().map(|&l| stride(out, l)).collect();
    let mut result = vec![0.0; checked_size(out.len(), n)?];
    let order = a.0.len();
    let mut digits = vec![0usize; order];
    'entries: for (offset, &w) in a.1.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let mut rest = offset;
        for k in (0..order).rev() {
            digits[k] = rest % n;
            rest /= n;
        }
        let (mut bbase, mut cbase) = (0, 0);
        for (j, &l) in la.iter().enumerate() {
            let mut value = None;
            for (k, &x) in a.0.iter().enumerate() {
                if x == l {
                    match value {
                        None => value = Some(digits[k]),
                        Some(v) if v != digits[k] => continue 'entries,
                        _ => {}
                    }
                }
            }
            let v = value.expect("label occurs in its factor");
            bbase += v * ab[j];
            cbase += v * ac[j];
        }
        for &(bo, co) in &pairs {
            result[cbase + co] += w * b.1[bbase + bo];
        }
    }
    Ok(result)
}

fn einsum_loop(inputs: &[(&[usize], &[f64])], out: &[usize], n: usize) -> Result<Vec<f64>> {
    let mut union: Vec<usize> = out.to_vec();
    for (labels, _) in inputs {
        for &l in labels.iter() {
            if !union.contains(&l) {
                union.push(l);
            }
        }
    }
    let size = checked_size(out.len(), n)?;
    let strides_for = |labels: &[usize]| -> Vec<usize> {
        let p = labels.len();
        union
            .iter()
            .map(|&u| {
                labels
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l == u)
                    .map(|(k, _)| n.pow((p - 1 - k) as u32))
                    .sum()
            })
            .collect()
    };
    let in_strides: Vec<Vec<usize>> = inputs.iter().map(|(l, _)| strides_for(l)).collect();
    let out_strides = strides_for(out);
    let mut result = vec![0.0; size];
    let axes = union.len();
    let total = (n as u128).pow(axes as u32);
    if total > (1u128 << 40) {
        return Err(Error::Capacity(format!("contraction loop of {n}^{axes} terms")));
    }
    let data: Vec<&[f64]> = inputs.iter().map(|(_, d)| *d).collect();
    if n == 0 {
        return Ok(result);
    }
    if axes == 0 {
        result[0] = data.iter().map(|d| d[0]).product();
        return Ok(result);
    }
    // odometer over the outer axes, tight loop over the last one
    let last = axes - 1;
    let in_last: Vec<usize> = in_strides.iter().map(|s| s[last]).collect();
    let out_last = out_strides[last];
    let mut idx = vec![0usize; last];
    let mut offs = vec![0usize; inputs.len()];
    let mut out_off = 0usize;
    for _ in 0..total / n as u128 {
        match data.as_slice() {
            [d] => {
                let (o, s) = (offs[0], in_last[0]);
                for t in 0..n {
                    result[out_off + t * out_last] += d[o + t * s];
                }
            }
            [d0, d1] => {
                let (o0, s0, o1, s1) = (offs[0], in_last[0], offs[1], in_last[1]);
                for t in 0..n {
                    result[out_off + t * out_last] += d0[o0 + t * s0] * d1[o1 + t * s1];
                }
            }
            _ => {
                for t in 0..n {
                    let mut prod = 1.0;
                    for ((d, &o), &s) in data.iter().zip(&offs).zip(&in_last) {
                        prod *= d[o + t * s];
                    }
                    result[out_off + t * out_last] += prod;
                }
            }
        }
        let mut ax = last;
        while ax > 0 {
            ax -= 1;
            idx[ax] += 1;
            for (o, s) in offs.iter_mut().zip(&in_strides) {
                *o += s[ax];
            }
            out_off += out_strides[ax];
            if idx[ax] < n {
                break;
            }
            idx[ax] = 0;
            for (o, s) in offs.iter_mut().zip(&in_strides) {
                *o -= n * s[ax];
            }
            out_off -= n * out_strides[ax];
        }
    }
    Ok(result)
}

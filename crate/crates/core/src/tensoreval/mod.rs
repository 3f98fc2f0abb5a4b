//! Trace invariants of maps and hyper-maps acting on dense tensors.
//!
//! A closed map evaluates to `N^-gamma` times the full contraction; a map with
//! boundaries evaluates to the unnormalized tensor indexed by its boundaries
//! in rank order. Each `alpha`-cycle is one summation index.

mod io;
mod plan;
mod tensor;

pub use io::{read_tensor, read_tensor_csv, write_tensor, write_tensor_csv};
pub use plan::{ContractionPlan, Step};
pub use tensor::{checked_size, identity_tensor, orbit_action, DenseTensor, MAX_ENTRIES};

use std::collections::HashMap;

use crate::combmap::{ColoredMap, CombMap};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Greedy elimination order for `m`.
pub fn plan_contraction(m: &CombMap) -> ContractionPlan {
    ContractionPlan::new(m)
}

/// Evaluate with one tensor per vertex.
pub fn eval_map(m: &CombMap, tensors: &[&DenseTensor]) -> Result<DenseTensor> {
    plan_contraction(m).evaluate(tensors)
}

/// The tensor bound to each vertex by color.
pub fn tensors_by_color<'a>(
    cm: &ColoredMap,
    tensors: &'a HashMap<String, DenseTensor>,
) -> Result<Vec<&'a DenseTensor>> {
    cm.colors()
        .iter()
        .map(|c| {
            tensors
                .get(c)
                .ok_or_else(|| Error::Missing(format!("tensor for color `{c}`")))
        })
        .collect()
}

/// Evaluate a colored map with tensors looked up by color.
pub fn eval_invariant(cm: &ColoredMap, tensors: &HashMap<String, DenseTensor>) -> Result<DenseTensor> {
    eval_map(cm.map(), &tensors_by_color(cm, tensors)?)
}

/// Scalar value of a closed map.
pub fn eval_closed(cm: &ColoredMap, tensors: &HashMap<String, DenseTensor>) -> Result<f64> {
    if !cm.map().is_closed() {
        return Err(Error::Precondition("scalar evaluation needs a closed map".into()));
    }
    Ok(eval_invariant(cm, tensors)?.data()[0])
}

/// Direct summation over every index assignment, in any scalar type.
///
/// `data[v]` is the row-major entry list of vertex v's tensor.
pub fn naive_eval<S: Scalar>(m: &CombMap, data: &[&[S]], n: usize) -> Result<Vec<S>> {
    if data.len() != m.vertex_count() {
        return Err(Error::Arity(format!("{} tensors for {} vertices", data.len(), m.vertex_count())));
    }
    for (v, d) in data.iter().enumerate() {
        if d.len() != n.pow(m.degree(v) as u32) {
            return Err(Error::Arity(format!("vertex {v} tensor has {} entries", d.len())));
        }
    }
    let cycles = m.alpha().cycles();
    let mut label = vec![0; m.edge_count()];
    for (i, c) in cycles.iter().enumerate() {
        for &e in c {
            label[e] = i;
        }
    }
    let q = m.boundary_count();
    let out_labels: Vec<usize> = m.boundary().iter().map(|&e| label[e]).collect();
    let mut out = vec![S::zero(); checked_size(q, n)?];
    let mut value = vec![0usize; cycles.len()];
    loop {
        let mut prod = S::one();
        for (v, legs) in m.vertices().iter().enumerate() {
            let off = legs.iter().fold(0, |acc, &e| acc * n + value[label[e]]);
            prod = prod * data[v][off].clone();
        }
        let o = out_labels.iter().fold(0, |acc, &l| acc * n + value[l]);
        out[o] = out[o].clone() + prod;
        let mut k = 0;
        loop {
            if k == value.len() {
                if m.is_closed() {
                    let scale = S::int_pow(n as i64, -(m.gamma() as i32));
                    return Ok(out.into_iter().map(|x| x * scale.clone()).collect());
                }
                return Ok(out);
            }
            value[k] += 1;
            if value[k] < n {
                break;
            }
            value[k] = 0;
            k += 1;
        }
    }
}

/// `|m(A^N)|` per map and dimension, with the supremum over the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeTable {
    pub n_grid: Vec<usize>,
    /// `values[map][grid position]`.
    pub values: Vec<Vec<f64>>,
    pub sup: Vec<f64>,
}

/// Evaluate each closed map on a family of tensors built per dimension.
pub fn probe_bounds<F>(family: F, maps: &[ColoredMap], n_grid: &[usize]) -> Result<ProbeTable>
where
    F: Fn(usize) -> Result<HashMap<String, DenseTensor>>,
{
    let mut values = vec![Vec::with_capacity(n_grid.len()); maps.len()];
    for &n in n_grid {
        let tensors = family(n)?;
        for (row, cm) in values.iter_mut().zip(maps) {
            row.push(eval_closed(cm, &tensors)?.abs());
        }
    }
    let sup = values.iter().map(|r| r.iter().copied().fold(0.0, f64::max)).collect();
    Ok(ProbeTable {
        n_grid: n_grid.to_vec(),
        values,
        sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::{random_hypermap, random_map, MapKind};
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(rng: &mut impl Rng, p: usize, n: usize) -> DenseTensor {
        DenseTensor::from_fn(p, n, |_| rng.random_range(-1.0..1.0)).unwrap()
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn loop_on_identity_is_one() {
        let b2 = CombMap::bouquet(2, None).unwrap();
        for n in [1, 4, 7] {
            let id = DenseTensor::identity_matrix(n);
            assert_eq!(eval_map(&b2, &[&id]).unwrap().data(), &[1.0]);
        }
    }

    #[test]
    fn melon_on_a_matrix() {
        let m = DenseTensor::matrix(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let f2 = CombMap::melon(2, None).unwrap();
        assert_eq!(eval_map(&f2, &[&m, &m]).unwrap().data(), &[15.0]);
    }

    #[test]
    fn figure_one_map_matches_direct_sum() {
        let m = CombMap::from_cycles(
            &[vec![1, 2, 3, 4, 5], vec![6, 7, 8], vec![9, 10]],
            &[vec![1, 2], vec![3, 6], vec![4, 7], vec![5, 9], vec![8, 10]],
            MapKind::Map,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 2;
        let t1 = random_tensor(&mut rng, 5, n);
        let t2 = random_tensor(&mut rng, 3, n);
        let m1 = random_tensor(&mut rng, 2, n);
        let mut direct = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        for e in 0..n {
                            direct += t1.get(&[a, a, b, c, d]) * t2.get(&[b, c, e]) * m1.get(&[d, e]);
                        }
                    }
                }
            }
        }
        let v = eval_map(&m, &[&t1, &t2, &m1]).unwrap().data()[0];
        assert!(rel_err(v, direct / n as f64) < 1e-12);
    }

    #[test]
    fn plans_have_the_documented_shape() {
        let f3 = plan_contraction(&CombMap::melon(3, None).unwrap());
        assert_eq!(f3.merge_count(), 1);
        assert_eq!(f3.peak_exponent(), 0);
        let chain = plan_contraction(&CombMap::cycle(6).unwrap());
        assert_eq!(chain.peak_exponent(), 2);
    }

    #[test]
    fn plan_matches_naive_on_random_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..40 {
            let degrees: Vec<usize> = (0..rng.random_range(1..=4)).map(|_| rng.random_range(1..=3)).collect();
            let total: usize = degrees.iter().sum();
            let boundary = if trial % 3 == 0 { total % 2 } else { total % 2 + 2.min(total - total % 2) };
            let m = random_map(&mut rng, &degrees, boundary).unwrap();
            let n = 3;
            let ts: Vec<DenseTensor> = degrees.iter().map(|&d| random_tensor(&mut rng, d, n)).collect();
            let refs: Vec<&DenseTensor> = ts.iter().collect();
            let data: Vec<&[f64]> = ts.iter().map(|t| t.data()).collect();
            let fast = eval_map(&m, &refs).unwrap();
            let slow = naive_eval(&m, &data, n).unwrap();
            for (a, b) in fast.data().iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{m:?}");
            }
        }
    }

    #[test]
    fn hyper_edges_share_one_index() {
        // three vectors on one hyper-edge: sum_i x_i y_i z_i / N
        let m = CombMap::from_cycles(&[vec![1], vec![2], vec![3]], &[vec![1, 2, 3]], MapKind::Hypermap).unwrap();
        let x = DenseTensor::new(1, 2, vec![1.0, 2.0]).unwrap();
        let y = DenseTensor::new(1, 2, vec![3.0, 4.0]).unwrap();
        let z = DenseTensor::new(1, 2, vec![5.0, 6.0]).unwrap();
        assert_eq!(eval_map(&m, &[&x, &y, &z]).unwrap().data(), &[(15.0 + 48.0) / 2.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let degrees = vec![2, 1, 3];
            let h = random_hypermap(&mut rng, &degrees).unwrap();
            let ts: Vec<DenseTensor> = degrees.iter().map(|&d| random_tensor(&mut rng, d, 3)).collect();
            let data: Vec<&[f64]> = ts.iter().map(|t| t.data()).collect();
            let fast = eval_map(&h, &ts.iter().collect::<Vec<_>>()).unwrap().data()[0];
            let slow = naive_eval(&h, &data, 3).unwrap()[0];
            assert!(rel_err(fast, slow) < 1e-12);
        }
    }

    #[test]
    fn exact_naive_sum() {
        let f2 = CombMap::melon(2, None).unwrap();
        let d: Vec<BigRational> = [1, 2, 3, 4].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        let v = naive_eval(&f2, &[&d, &d], 2).unwrap();
        assert_eq!(v[0], BigRational::from_integer(15.into()));
    }

    #[test]
    fn boundary_outputs_follow_rank_order() {
        // a single vertex with three boundaries returns the tensor itself
        let star = CombMap::star(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = random_tensor(&mut rng, 3, 2);
        assert_eq!(eval_map(&star, &[&t]).unwrap(), t);
        // a matrix wired to a matrix through one edge is a product
        let chain = CombMap::from_cycles(&[vec![1, 2], vec![3, 4]], &[vec![2, 3]], MapKind::Map).unwrap();
        let a = random_tensor(&mut rng, 2, 3);
        let b = random_tensor(&mut rng, 2, 3);
        let ab = eval_map(&chain, &[&a, &b]).unwrap();
        assert!(ab.max_abs_diff(&a.matmul(&b).unwrap()) < 1e-12);
    }

    #[test]
    fn probe_identity_family() {
        let maps = vec![ColoredMap::uniform(CombMap::bouquet(2, None).unwrap(), "id").unwrap()];
        let table = probe_bounds(
            |n| Ok(HashMap::from([("id".to_string(), DenseTensor::identity_matrix(n))])),
            &maps,
            &[2, 4, 8],
        )
        .unwrap();
        assert_eq!(table.values[0], vec![1.0, 1.0, 1.0]);
        assert_eq!(table.sup, vec![1.0]);
    }

    #[test]
    fn diagonal_tensor_probes_stay_bounded() {
        let f3 = ColoredMap::uniform(CombMap::melon(3, None).unwrap(), "d").unwrap();
        let hyper = ColoredMap::uniform(
            CombMap::from_cycles(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]], &[vec![1, 4, 7], vec![2, 5, 8], vec![3, 6, 9]], MapKind::Hypermap)
                .unwrap(),
            "d",
        )
        .unwrap();
        let grid = [2, 4, 8, 16];
        let diag = |n: usize| -> Result<HashMap<String, DenseTensor>> {
            let t = DenseTensor::from_fn(3, n, |i| f64::from(u8::from(i[0] == i[1] && i[1] == i[2])))?;
            Ok(HashMap::from([("d".to_string(), t)]))
        };
        let table = probe_bounds(diag, &[f3, hyper], &grid).unwrap();
        // both count the N diagonal entries once: value N / N = 1
        for row in &table.values {
            assert!(row.iter().all(|&v| (v - 1.0).abs() < 1e-12), "{row:?}");
        }
    }
}

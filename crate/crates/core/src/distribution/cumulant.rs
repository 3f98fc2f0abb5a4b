//! Free cumulants by Möbius inversion on the switch poset.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use super::AbstractDistribution;
use crate::combmap::{canonical_form, connected_colored_maps, ColoredMap};
use crate::error::{Error, Result};
use crate::poset::{interval, minimal_map, Interval};
use crate::scalar::Scalar;

pub(crate) fn interval_below(cm: &ColoredMap) -> Result<Arc<Interval>> {
    if !cm.map().is_closed() {
        return Err(Error::Precondition("cumulants are defined on closed maps".into()));
    }
    if !cm.map().all_degrees_even() {
        return Err(Error::Unsupported(
            "cumulants of maps with odd-degree vertices (no unique minimal map)".into(),
        ));
    }
    let bottom = minimal_map(cm.map())?;
    interval(&bottom, cm.map())
}

pub(crate) fn colored(cm: &ColoredMap, iv: &Interval, i: usize) -> ColoredMap {
    ColoredMap::new(iv.elements()[i].clone(), cm.colors().to_vec()).expect("same vertices and colors")
}

/// κ_m = Σ_{n ≤ m} μ(n, m) · dist(n).
pub fn cumulant_transform<S: Scalar>(dist: &AbstractDistribution<S>, cm: &ColoredMap) -> Result<S> {
    let iv = interval_below(cm)?;
    let mut acc = S::zero();
    for i in 0..iv.len() {
        let mu = iv.moebius_to_top(i);
        if mu != 0 {
            acc = acc + S::from_i64(mu) * dist.value(&colored(cm, &iv, i))?;
        }
    }
    Ok(acc)
}

/// Cumulants of connected maps; disconnected maps take products.
#[derive(Clone, Debug, Default)]
pub struct CumulantTable<S: Scalar> {
    values: BTreeMap<String, S>,
}

impl<S: Scalar> CumulantTable<S> {
    pub fn new() -> Self {
        CumulantTable { values: BTreeMap::new() }
    }

    /// Cumulants of every connected component appearing below each map.
    pub fn from_distribution(dist: &AbstractDistribution<S>, maps: &[ColoredMap]) -> Result<Self> {
        let mut table = Self::new();
        for cm in maps {
            let iv = interval_below(cm)?;
            for i in 0..iv.len() {
                for comp in colored(cm, &iv, i).split_components() {
                    let key = canonical_form(&comp).key;
                    if let std::collections::btree_map::Entry::Vacant(e) = table.values.entry(key) {
                        let k = cumulant_transform(dist, &comp)?;
                        e.insert(k);
                    }
                }
            }
        }
        Ok(table)
    }

    pub fn insert(&mut self, cm: &ColoredMap, value: S) -> Result<()> {
        if cm.map().gamma() != 1 {
            return Err(Error::Precondition("cumulant tables store connected maps".into()));
        }
        self.values.insert(canonical_form(cm).key, value);
        Ok(())
    }

    pub fn get(&self, cm: &ColoredMap) -> Option<&S> {
        self.values.get(&canonical_form(cm).key)
    }

    /// κ of a closed map as the product over its components.
    pub fn value(&self, cm: &ColoredMap) -> Result<S> {
        let mut acc = S::one();
        for comp in cm.split_components() {
            let key = canonical_form(&comp).key;
            acc = acc * self.values.get(&key).cloned().ok_or(Error::Missing(key))?;
        }
        Ok(acc)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &S)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Moment of `cm` as the sum of the cumulants below it.
pub fn moments_from_cumulants<S: Scalar>(table: &CumulantTable<S>, cm: &ColoredMap) -> Result<S> {
    let iv = interval_below(cm)?;
    let mut acc = S::zero();
    for i in 0..iv.len() {
        acc = acc + table.value(&colored(cm, &iv, i))?;
    }
    Ok(acc)
}

/// Joint distribution in which the marginals are free.
///
/// Each marginal must consist of a single family. Mixed moments are
/// assembled from the marginal cumulants, with every connected
/// non-monochromatic cumulant set to zero.
pub fn free_product<S: Scalar>(marginals: &[AbstractDistribution<S>]) -> Result<AbstractDistribution<S>> {
    let mut joint = AbstractDistribution::new();
    let mut owner: HashMap<String, usize> = HashMap::new();
    for (i, marginal) in marginals.iter().enumerate() {
        if marginal.families().len() > 1 {
            return Err(Error::Precondition(format!("marginal {i} has more than one family")));
        }
        for (color, arity) in marginal.colors() {
            if owner.insert(color.to_string(), i).is_some() {
                return Err(Error::Precondition(format!("color `{color}` appears in two marginals")));
            }
            joint.declare(color, arity, marginal.family(color)?)?;
        }
        for (_, cm, v) in marginal.entries() {
            joint.insert(cm, v.clone())?;
        }
    }
    let marginals: Arc<Vec<AbstractDistribution<S>>> = Arc::new(marginals.to_vec());
    let owner = Arc::new(owner);
    let memo: Arc<Mutex<HashMap<String, S>>> = Arc::default();

    let owner_of = {
        let owner = owner.clone();
        move |cm: &ColoredMap| -> Option<usize> {
            let first = owner[cm.color(0)];
            cm.colors().iter().all(|c| owner[c] == first).then_some(first)
        }
    };
    let rule = move |cm: &ColoredMap| -> Result<S> {
        if let Some(i) = owner_of(cm) {
            return marginals[i].value(cm);
        }
        let iv = interval_below(cm)?;
        let mut acc = S::zero();
        'elements: for i in 0..iv.len() {
            let mut term = S::one();
            for comp in colored(cm, &iv, i).split_components() {
                let Some(j) = owner_of(&comp) else {
                    continue 'elements;
                };
                let key = canonical_form(&comp).key;
                let cached = memo.lock().expect("memo lock").get(&key).cloned();
                let k = match cached {
                    Some(k) => k,
                    None => {
                        let k = cumulant_transform(&marginals[j], &comp)?;
                        memo.lock().expect("memo lock").insert(key, k.clone());
                        k
                    }
                };
                if k.is_exact_zero() {
                    continue 'elements;
                }
                term = term * k;
            }
            acc = acc + term;
        }
        Ok(acc)
    };
    Ok(joint.with_rule(Arc::new(rule)))
}

/// Result of the vanishing-mixed-cumulant test.
#[derive(Clone, Debug, PartialEq)]
pub struct FreenessVerdict {
    pub passed: bool,
    /// Number of connected non-monochromatic maps tested.
    pub checked: usize,
    pub max_abs: f64,
    /// Canonical keys and cumulants of the offending maps.
    pub witnesses: Vec<(String, f64)>,
}

/// Connected maps over the distribution's colors within a size budget.
pub fn cumulant_budget<S: Scalar>(
    dist: &AbstractDistribution<S>,
    max_vertices: usize,
    max_edges: usize,
) -> Result<Vec<ColoredMap>> {
    let arity: Vec<(&str, usize)> = dist.colors().collect();
    connected_colored_maps(&arity, max_vertices, max_edges)
}

/// Checks κ_m = 0 on every connected non-monochromatic map of `budget`.
pub fn is_free_cumulant_test<S: Scalar>(
    dist: &AbstractDistribution<S>,
    budget: &[ColoredMap],
    tolerance: f64,
) -> Result<FreenessVerdict> {
    let mut verdict = FreenessVerdict {
        passed: true,
        checked: 0,
        max_abs: 0.0,
        witnesses: Vec::new(),
    };
    for cm in budget {
        if cm.map().gamma() != 1 || dist.family_of_map(cm)?.is_some() {
            continue;
        }
        verdict.checked += 1;
        let k = cumulant_transform(dist, cm)?;
        let a = k.abs_f64();
        verdict.max_abs = verdict.max_abs.max(a);
        if !k.is_exact_zero() && a > tolerance {
            verdict.passed = false;
            verdict.witnesses.push((canonical_form(cm).key, k.to_f64()));
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::CombMap;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn cm(map: CombMap, colors: &[&str]) -> ColoredMap {
        ColoredMap::new(map, colors.iter().map(|c| c.to_string()).collect()).unwrap()
    }

    /// Moments of a fixed 2x2 matrix, evaluated exactly.
    fn matrix_distribution(name: &str, entries: [i64; 4]) -> AbstractDistribution<BigRational> {
        let data: Vec<BigRational> = entries.iter().map(|&x| rational(x, 1)).collect();
        let rule = move |m: &ColoredMap| -> Result<BigRational> {
            let tensors: Vec<&[BigRational]> = vec![&data[..]; m.map().vertex_count()];
            Ok(crate::tensoreval::naive_eval(m.map(), &tensors, 2)?[0].clone())
        };
        AbstractDistribution::new()
            .with_color(name, 2, name)
            .unwrap()
            .with_rule(Arc::new(rule))
    }

    #[test]
    fn minimal_map_cumulant_is_its_moment() {
        let d = matrix_distribution("a", [1, 2, 3, 5]);
        let b = cm(CombMap::bouquet(2, None).unwrap(), &["a"]);
        assert_eq!(cumulant_transform(&d, &b).unwrap(), d.value(&b).unwrap());
    }

    #[test]
    fn melon_cumulant_is_a_variance() {
        let d = matrix_distribution("a", [1, 2, 3, 5]);
        let sigma = crate::Permutation::from_images(vec![1, 0]).unwrap();
        let m = cm(CombMap::melon(2, Some(&sigma)).unwrap(), &["a", "a"]);
        // Leg k meets leg σ(k): Tr(M M) / 2.
        let tr_mm = rational(1 + 2 * 3 + 3 * 2 + 25, 2);
        let tr = rational(6, 2);
        let expect = tr_mm - tr.clone() * tr;
        assert_eq!(cumulant_transform(&d, &m).unwrap(), expect);
    }

    #[test]
    fn round_trip_on_small_maps() {
        let d = matrix_distribution("a", [2, -1, 4, 3]);
        let maps = cumulant_budget(&d, 4, 8).unwrap();
        assert!(maps.len() > 5);
        let table = CumulantTable::from_distribution(&d, &maps).unwrap();
        for m in &maps {
            assert_eq!(moments_from_cumulants(&table, m).unwrap(), d.value(m).unwrap());
        }
    }

    #[test]
    fn odd_degrees_are_unsupported() {
        let d = AbstractDistribution::<f64>::new().with_color("t", 3, "t").unwrap();
        let m = cm(CombMap::melon(3, None).unwrap(), &["t", "t"]);
        assert!(matches!(cumulant_transform(&d, &m), Err(Error::Unsupported(_))));
    }

    #[test]
    fn free_product_of_two_matrices() {
        let a = matrix_distribution("a", [1, 2, 2, 3]);
        let b = matrix_distribution("b", [0, 1, 1, 4]);
        let joint = free_product(&[a.clone(), b.clone()]).unwrap();
        let loop_a = cm(CombMap::bouquet(2, None).unwrap(), &["a"]);
        let loop_b = cm(CombMap::bouquet(2, None).unwrap(), &["b"]);
        let mixed = cm(CombMap::melon(2, None).unwrap(), &["a", "b"]);
        assert_eq!(
            joint.value(&mixed).unwrap(),
            a.value(&loop_a).unwrap() * b.value(&loop_b).unwrap()
        );
        let budget = cumulant_budget(&joint, 4, 8).unwrap();
        let verdict = is_free_cumulant_test(&joint, &budget, 0.0).unwrap();
        assert!(verdict.passed && verdict.checked > 3, "{verdict:?}");
        assert_eq!(verdict.max_abs, 0.0);
    }

    #[test]
    fn nonzero_mixed_melon_is_a_witness() {
        let mut d = AbstractDistribution::<f64>::new()
            .with_color("a", 2, "x")
            .unwrap()
            .with_color("b", 2, "y")
            .unwrap();
        let loop_a = cm(CombMap::bouquet(2, None).unwrap(), &["a"]);
        let loop_b = cm(CombMap::bouquet(2, None).unwrap(), &["b"]);
        let mixed = cm(CombMap::melon(2, None).unwrap(), &["a", "b"]);
        d.insert(&loop_a, 0.0).unwrap();
        d.insert(&loop_b, 0.0).unwrap();
        d.insert(&mixed, 0.3).unwrap();
        let v = is_free_cumulant_test(&d, std::slice::from_ref(&mixed), 1e-10).unwrap();
        assert!(!v.passed);
        assert_eq!(v.witnesses, vec![(canonical_form(&mixed).key, 0.3)]);
    }

    #[test]
    fn single_family_passes_vacuously() {
        let d = matrix_distribution("a", [1, 0, 0, 1]);
        let budget = cumulant_budget(&d, 3, 6).unwrap();
        let v = is_free_cumulant_test(&d, &budget, 0.0).unwrap();
        assert!(v.passed);
        assert_eq!(v.checked, 0);
    }
}

//! Built-in maps and tensors for the checks that run without input files.

use std::collections::HashMap;
use std::sync::Arc;

use tensorfree::combmap::{connected_colored_maps, parse_map, SlotLink};
use tensorfree::distribution::{AbstractDistribution, JointSampler};
use tensorfree::moments::{limit_moment_gaussian, GaussianEnsemble};
use tensorfree::randgen::{haar_orthogonal, EnsembleSpec, EntryLaw, GoteSampler, VarianceProfile};
use tensorfree::tensoreval::{eval_closed, orbit_action, DenseTensor};
use tensorfree::{ColoredMap, CombMap, MapKind, Result};

fn names(colors: &[&str]) -> Vec<String> {
    colors.iter().map(|c| c.to_string()).collect()
}

/// Tr(A U B Uᵀ), Tr(U A Uᵀ) and Tr(U A U B) with the Haar color `u`.
pub fn haar_maps() -> Result<Vec<ColoredMap>> {
    use SlotLink::{Boundary, To};
    Ok(vec![
        ColoredMap::from_slots(
            &[2, 2, 2, 2],
            &[Boundary(0), To(2), To(1), To(4), To(3), To(7), Boundary(1), To(5)],
            &names(&["a", "u", "b", "u"]),
            MapKind::Map,
        )?,
        ColoredMap::from_slots(
            &[2, 2, 2],
            &[Boundary(0), To(2), To(1), To(5), Boundary(1), To(3)],
            &names(&["u", "a", "u"]),
            MapKind::Map,
        )?,
        ColoredMap::from_slots(
            &[2, 2, 2, 2],
            &[Boundary(0), To(2), To(1), To(4), To(3), To(6), To(5), Boundary(1)],
            &names(&["u", "a", "u", "b"]),
            MapKind::Map,
        )?,
    ])
}

/// Fixed matrices `a` and `b` for the default Haar maps.
pub fn haar_fixed(n: usize) -> Result<HashMap<String, DenseTensor>> {
    let a = DenseTensor::from_fn(2, n, |i| ((i[0] * 3 + i[1]) % 5) as f64 - 2.0)?;
    let b = DenseTensor::from_fn(2, n, |i| if i[0] == i[1] { 1.0 + (i[0] % 3) as f64 } else { 0.1 })?;
    Ok(HashMap::from([("a".to_string(), a), ("b".to_string(), b)]))
}

/// The melon of order p and, for p = 3, the dumbbell.
pub fn gaussian_maps(p: usize) -> Result<Vec<ColoredMap>> {
    let mut maps = vec![ColoredMap::uniform(CombMap::melon(p, None)?, "w")?];
    if p == 3 {
        maps.push(parse_map("MAPv1 | pi: (1 2 3)(4 5 6) | alpha: (1 2)(3 4)(5 6) | colors: w w")?);
    }
    Ok(maps)
}

/// Diagonal tensor with alternating ±1 entries.
fn signed_diagonal(p: usize, n: usize) -> Result<DenseTensor> {
    DenseTensor::from_fn(p, n, |i| {
        if i.iter().all(|&x| x == i[0]) {
            if i[0] % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        } else {
            0.0
        }
    })
}

/// A freeness experiment: joint sampler, reference marginals and budget.
pub struct FreenessSetup {
    pub colors: Vec<(&'static str, usize, &'static str)>,
    pub sampler: JointSampler,
    pub reference: AbstractDistribution<f64>,
    pub budget: Vec<ColoredMap>,
}

/// A diagonal order-3 tensor `d` and its Haar rotation `r`.
pub fn rotated_pair(n: usize) -> Result<FreenessSetup> {
    let pi = "(1 2 3)(4 5 6)(7 8 9)(10 11 12)";
    // One map per colored multigraph on two `d` and two `r` vertices; the
    // tensors are symmetric, so other maps repeat these values.
    let budget = [
        ("(1 6)(2 8)(3 10)(4 11)(5 9)(7 12)", "d r d r"),
        ("(1 6)(2 7)(3 8)(4 9)(5 11)(10 12)", "d d r r"),
        ("(1 6)(2 8)(3 7)(4 12)(5 11)(9 10)", "d r r d"),
    ]
    .iter()
    .map(|(alpha, colors)| parse_map(&format!("MAPv1 | pi: {pi} | alpha: {alpha} | colors: {colors}")))
    .collect::<Result<_>>()?;
    let d = signed_diagonal(3, n)?;
    let dd = d.clone();
    let sampler: JointSampler = Arc::new(move |rng| {
        let u = haar_orthogonal(n, rng);
        Ok(HashMap::from([("d".to_string(), dd.clone()), ("r".to_string(), orbit_action(&dd, &u)?)]))
    });
    let reference = AbstractDistribution::new()
        .with_color("d", 3, "d")?
        .with_color("r", 3, "r")?
        .with_rule(Arc::new(move |m: &ColoredMap| {
            let t = HashMap::from([("d".to_string(), d.clone()), ("r".to_string(), d.clone())]);
            eval_closed(m, &t)
        }));
    Ok(FreenessSetup {
        colors: vec![("d", 3, "d"), ("r", 3, "r")],
        sampler,
        reference,
        budget,
    })
}

/// A deterministic diagonal ±1 matrix `a` and a GOTE matrix `w`.
pub fn matrix_pair(n: usize, law: EntryLaw) -> Result<FreenessSetup> {
    let budget = connected_colored_maps(&[("a", 2), ("w", 2)], 4, 8)?
        .into_iter()
        .filter(|m| m.colors().iter().any(|c| c == "a") && m.colors().iter().any(|c| c == "w"))
        .collect();
    let a = signed_diagonal(2, n)?;
    let w = GoteSampler::new(EnsembleSpec {
        p: 2,
        n,
        law,
        seed: 0,
        profile: VarianceProfile::Standard,
    })?;
    let aa = a.clone();
    let sampler: JointSampler = Arc::new(move |rng| {
        Ok(HashMap::from([("a".to_string(), aa.clone()), ("w".to_string(), w.sample_with(rng))]))
    });
    let ensemble = GaussianEnsemble::new(["w"], VarianceProfile::Standard);
    let reference = AbstractDistribution::new()
        .with_color("a", 2, "a")?
        .with_color("w", 2, "w")?
        .with_rule(Arc::new(move |m: &ColoredMap| {
            if m.colors().iter().all(|c| c == "a") {
                eval_closed(m, &HashMap::from([("a".to_string(), a.clone())]))
            } else {
                limit_moment_gaussian(m, &ensemble, &AbstractDistribution::<f64>::new())
            }
        }));
    Ok(FreenessSetup {
        colors: vec![("a", 2, "a"), ("w", 2, "w")],
        sampler,
        reference,
        budget,
    })
}

//! Schwinger-Dyson elimination of Gaussian vertices.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{monte_carlo, MomentEstimate};
use crate::combmap::{alpha_wires, canonical_form, rewire, ColoredMap, End, Permutation};
use crate::distribution::AbstractDistribution;
use crate::error::{Error, Result};
use crate::randgen::{factorial, purpose, EnsembleSpec, EntryLaw, GoteSampler, SeedStream, VarianceProfile};
use crate::scalar::Scalar;
use crate::tensoreval::{eval_closed, DenseTensor};

/// Which colors are drawn from Gaussian-type ensembles, and how.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianEnsemble {
    pub colors: BTreeSet<String>,
    pub profile: VarianceProfile,
    pub law: EntryLaw,
}

impl GaussianEnsemble {
    pub fn new<I, C>(colors: I, profile: VarianceProfile) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<String>,
    {
        GaussianEnsemble {
            colors: colors.into_iter().map(Into::into).collect(),
            profile,
            law: EntryLaw::Gaussian,
        }
    }

    pub fn with_law(mut self, law: EntryLaw) -> Self {
        self.law = law;
        self
    }

    pub fn contains(&self, color: &str) -> bool {
        self.colors.contains(color)
    }

    /// Prefactor of the Schwinger-Dyson sum for order-p vertices.
    pub fn sd_coefficient(&self, p: usize) -> f64 {
        match self.profile {
            VarianceProfile::Standard => 1.0 / factorial(p - 1),
            VarianceProfile::Factorial => 1.0,
        }
    }

    fn sd_coefficient_exact<S: Scalar>(&self, p: usize) -> S {
        match self.profile {
            VarianceProfile::Standard => {
                let f: i64 = (1..p as i64).product();
                S::one() * S::int_pow(f, -1)
            }
            VarianceProfile::Factorial => S::one(),
        }
    }
}

/// One term of the Schwinger-Dyson expansion of a Gaussian vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct SdTerm {
    /// The vertex paired with the eliminated one.
    pub partner: usize,
    /// Leg k of the partner is identified with leg sigma(k) of the
    /// eliminated vertex.
    pub sigma: Permutation,
    pub map: ColoredMap,
    /// Closed loops made only of identified legs.
    pub loops: usize,
    /// Exponent of N in front of E_N[map]; zero for leading terms.
    pub exponent: i32,
}

/// The exact expansion
/// E_N[m] = c Σ_{v, σ} N^{exponent} E_N[m_{u,v,σ}]
/// for the highest-indexed Gaussian vertex u. Returns u and the terms.
pub fn gaussian_sd_terms(cm: &ColoredMap, ensemble: &GaussianEnsemble) -> Result<(usize, Vec<SdTerm>)> {
    let m = cm.map();
    if !m.is_closed() {
        return Err(Error::Precondition("expansion needs a closed map".into()));
    }
    let u = (0..m.vertex_count())
        .rev()
        .find(|&v| ensemble.contains(cm.color(v)))
        .ok_or_else(|| Error::Precondition("no Gaussian vertex to eliminate".into()))?;
    let p = m.degree(u);
    let gamma = m.gamma() as i32;
    let base = alpha_wires(m);
    let mut terms = Vec::new();
    for v in 0..m.vertex_count() {
        if v == u || cm.color(v) != cm.color(u) {
            continue;
        }
        for sigma in Permutation::all(p) {
            let mut wires = base.clone();
            for k in 0..p {
                wires.push((End::Edge(m.legs(v)[k]), End::Edge(m.legs(u)[sigma.apply(k)])));
            }
            let (map, loops) = rewire(cm, &[v.min(u), v.max(u)], &wires)?;
            let exponent = (map.map().gamma() + loops) as i32 - gamma - (p as i32 - 1);
            terms.push(SdTerm {
                partner: v,
                sigma,
                map,
                loops,
                exponent,
            });
        }
    }
    Ok((u, terms))
}

fn odd_color_count(cm: &ColoredMap, ensemble: &GaussianEnsemble) -> bool {
    let mut count: BTreeMap<&str, usize> = BTreeMap::new();
    for c in cm.colors() {
        if ensemble.contains(c) {
            *count.entry(c).or_default() += 1;
        }
    }
    count.values().any(|&k| k % 2 == 1)
}

fn limit_rec<S: Scalar>(
    cm: &ColoredMap,
    ensemble: &GaussianEnsemble,
    base: &AbstractDistribution<S>,
    memo: &mut HashMap<String, S>,
) -> Result<S> {
    let mut acc = S::one();
    for comp in cm.split_components() {
        if !comp.colors().iter().any(|c| ensemble.contains(c)) {
            acc = acc * base.value(&comp)?;
            continue;
        }
        if odd_color_count(&comp, ensemble) {
            return Ok(S::zero());
        }
        let canon = canonical_form(&comp);
        if let Some(v) = memo.get(&canon.key) {
            acc = acc * v.clone();
            continue;
        }
        let (u, terms) = gaussian_sd_terms(&canon.map, ensemble)?;
        let mut sum = S::zero();
        for t in terms.iter().filter(|t| t.exponent == 0) {
            sum = sum + limit_rec(&t.map, ensemble, base, memo)?;
        }
        let value = ensemble.sd_coefficient_exact::<S>(canon.map.map().degree(u)) * sum;
        memo.insert(canon.key, value.clone());
        acc = acc * value;
    }
    Ok(acc)
}

/// Large-N limit of E_N[m] by eliminating Gaussian vertices and keeping the
/// leading terms. Components without Gaussian vertices are read from `base`.
pub fn limit_moment_gaussian<S: Scalar>(
    cm: &ColoredMap,
    ensemble: &GaussianEnsemble,
    base: &AbstractDistribution<S>,
) -> Result<S> {
    if !cm.map().is_closed() {
        return Err(Error::Precondition("limits are defined on closed maps".into()));
    }
    limit_rec(cm, ensemble, base, &mut HashMap::new())
}

pub(crate) fn closed_value(cm: &ColoredMap, tensors: &HashMap<String, DenseTensor>) -> Result<f64> {
    if cm.map().vertex_count() == 0 {
        return Ok(1.0);
    }
    eval_closed(cm, tensors)
}

/// Samplers for every Gaussian color of `cm`, in color order.
pub(crate) fn samplers_for(
    cm: &ColoredMap,
    ensemble: &GaussianEnsemble,
    n: usize,
) -> Result<Vec<(String, GoteSampler)>> {
    let mut arity: BTreeMap<&str, usize> = BTreeMap::new();
    for (v, c) in cm.colors().iter().enumerate() {
        if ensemble.contains(c) {
            arity.insert(c, cm.map().degree(v));
        }
    }
    arity
        .into_iter()
        .map(|(c, p)| {
            let spec = EnsembleSpec {
                p,
                n,
                law: ensemble.law,
                seed: 0,
                profile: ensemble.profile,
            };
            Ok((c.to_string(), GoteSampler::new(spec)?))
        })
        .collect()
}

/// Monte Carlo estimate of E_N[m] − c Σ E_N[m_{u,v,σ}] over the leading
/// terms, with both sides evaluated on the same draws.
pub fn gaussian_residual(
    cm: &ColoredMap,
    ensemble: &GaussianEnsemble,
    fixed: &HashMap<String, DenseTensor>,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<MomentEstimate> {
    let (u, terms) = gaussian_sd_terms(cm, ensemble)?;
    let leading: Vec<SdTerm> = terms.into_iter().filter(|t| t.exponent == 0).collect();
    let c = ensemble.sd_coefficient(cm.map().degree(u));
    let samplers = samplers_for(cm, ensemble, n)?;
    let stream = SeedStream::new(seed);
    let stats = monte_carlo(samples, 1, |i| {
        let mut rng = stream.rng(purpose::TENSOR, i);
        let mut tensors = fixed.clone();
        for (color, s) in &samplers {
            tensors.insert(color.clone(), s.sample_with(&mut rng));
        }
        let mut r = closed_value(cm, &tensors)?;
        for t in &leading {
            r -= c * closed_value(&t.map, &tensors)?;
        }
        Ok(vec![r])
    })?;
    Ok(MomentEstimate::sampled(cm, n, stats[0], seed))
}

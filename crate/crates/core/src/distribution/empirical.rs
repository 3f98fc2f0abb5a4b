//! Monte Carlo estimates of a distribution.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use super::AbstractDistribution;
use crate::combmap::{canonical_form, ColoredMap};
use crate::error::{Error, Result};
use crate::moments::{monte_carlo, SampleStats};
use crate::randgen::{purpose, SeedStream};
use crate::tensoreval::{eval_closed, DenseTensor};

/// Draws one joint realization of every color.
pub type JointSampler = Arc<dyn Fn(&mut ChaCha8Rng) -> Result<HashMap<String, DenseTensor>> + Send + Sync>;

#[derive(Clone, Debug)]
pub struct EmpiricalDistribution {
    pub distribution: AbstractDistribution<f64>,
    /// Per canonical key.
    pub stats: BTreeMap<String, SampleStats>,
}

impl EmpiricalDistribution {
    pub fn stderr_table(&self) -> BTreeMap<String, f64> {
        self.stats.iter().map(|(k, s)| (k.clone(), s.stderr)).collect()
    }

    pub fn stats(&self, cm: &ColoredMap) -> Option<&SampleStats> {
        self.stats.get(&canonical_form(cm).key)
    }
}

/// Monte Carlo means of connected closed maps. Sample `i` uses the stream
/// `(seed, EXPERIMENT, i)` and every map is evaluated on that same draw.
///
/// `colors` lists `(color, arity, family)`.
pub fn empirical_distribution(
    sampler: &JointSampler,
    colors: &[(&str, usize, &str)],
    maps: &[ColoredMap],
    samples: u64,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    let mut dist = AbstractDistribution::new();
    for &(c, a, f) in colors {
        dist.declare(c, a, f)?;
    }
    for cm in maps {
        if !cm.map().is_closed() || cm.map().gamma() != 1 {
            return Err(Error::Precondition("empirical moments are taken on connected closed maps".into()));
        }
    }
    let stream = SeedStream::new(seed);
    let stats = monte_carlo(samples, maps.len(), |i| {
        let tensors = sampler(&mut stream.rng(purpose::EXPERIMENT, i))?;
        maps.iter().map(|cm| eval_closed(cm, &tensors)).collect()
    })?;
    let mut table = BTreeMap::new();
    for (cm, s) in maps.iter().zip(stats) {
        dist.insert(cm, s.mean)?;
        table.insert(canonical_form(cm).key, s);
    }
    Ok(EmpiricalDistribution {
        distribution: dist,
        stats: table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::CombMap;
    use crate::randgen::{EnsembleSpec, EntryLaw, GoteSampler, VarianceProfile};

    #[test]
    fn identity_loop_is_exactly_one() {
        let sampler: JointSampler =
            Arc::new(|_| Ok(HashMap::from([("i".to_string(), DenseTensor::identity_matrix(5))])));
        let b2 = ColoredMap::uniform(CombMap::bouquet(2, None).unwrap(), "i").unwrap();
        let e = empirical_distribution(&sampler, &[("i", 2, "i")], std::slice::from_ref(&b2), 10, 1).unwrap();
        assert_eq!(e.distribution.value(&b2).unwrap(), 1.0);
        assert_eq!(e.stats(&b2).unwrap().stderr, 0.0);
    }

    #[test]
    fn stderr_shrinks_with_samples() {
        let gote = GoteSampler::new(EnsembleSpec {
            p: 2,
            n: 6,
            law: EntryLaw::Gaussian,
            seed: 0,
            profile: VarianceProfile::Standard,
        })
        .unwrap();
        let sampler: JointSampler = Arc::new(move |rng| Ok(HashMap::from([("w".to_string(), gote.sample_with(rng))])));
        let f2 = ColoredMap::uniform(CombMap::melon(2, None).unwrap(), "w").unwrap();
        let small = empirical_distribution(&sampler, &[("w", 2, "w")], std::slice::from_ref(&f2), 400, 5).unwrap();
        let large = empirical_distribution(&sampler, &[("w", 2, "w")], std::slice::from_ref(&f2), 6400, 5).unwrap();
        let ratio = small.stats(&f2).unwrap().stderr / large.stats(&f2).unwrap().stderr;
        assert!((3.0..5.3).contains(&ratio), "ratio {ratio}");
        assert!((large.distribution.value(&f2).unwrap() - 7.0 / 6.0).abs() < 4.0 * large.stats(&f2).unwrap().stderr);
    }
}

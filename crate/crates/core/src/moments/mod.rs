//! Exact and asymptotic moments: the Gaussian Wick oracle, Weingarten
//! calculus for Haar orthogonal matrices, Schwinger-Dyson residuals and
//! large-N limits.

mod gaussian;
mod haar;
mod montecarlo;
mod rotated;
mod wick;

pub use gaussian::{
    gaussian_residual, gaussian_sd_terms, limit_moment_gaussian, GaussianEnsemble, SdTerm,
};
pub use haar::{
    exact_haar_moment, haar_residual, haar_sd_terms, pairings, weingarten_table, HaarSdTerm, WeingartenTable,
};
pub use montecarlo::{monte_carlo, SampleStats};
pub use rotated::limit_moment_rotated;
pub use wick::{exact_gaussian_moment, exact_gaussian_moment_rational};

use serde::{Deserialize, Serialize};

use crate::combmap::{canonical_form, ColoredMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
    SdRecursion,
}

/// A moment value with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub map_canonical: String,
    pub method: Method,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: Option<u64>,
}

impl MomentEstimate {
    pub fn exact(cm: &ColoredMap, n: Option<usize>, value: f64) -> Self {
        MomentEstimate {
            map_canonical: canonical_form(cm).key,
            method: Method::Exact,
            n,
            value,
            stderr: 0.0,
            samples: 0,
            seed: None,
        }
    }

    pub fn limit(cm: &ColoredMap, value: f64) -> Self {
        MomentEstimate {
            method: Method::SdRecursion,
            ..Self::exact(cm, None, value)
        }
    }

    pub fn sampled(cm: &ColoredMap, n: usize, stats: SampleStats, seed: u64) -> Self {
        MomentEstimate {
            map_canonical: canonical_form(cm).key,
            method: Method::MonteCarlo,
            n: Some(n),
            value: stats.mean,
            stderr: stats.stderr,
            samples: stats.samples,
            seed: Some(seed),
        }
    }

    /// |value - target| in units of stderr; infinite when an exact value
    /// misses its target.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.value - target).abs();
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::CombMap;

    #[test]
    fn json_field_names() {
        let cm = ColoredMap::uniform(CombMap::melon(2, None).unwrap(), "w").unwrap();
        let e = MomentEstimate::exact(&cm, Some(3), 1.5);
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v["method"], "exact");
        assert_eq!(v["N"], 3);
        assert_eq!(v["stderr"], 0.0);
        let back: MomentEstimate = serde_json::from_value(v).unwrap();
        assert_eq!(back, e);
    }
}

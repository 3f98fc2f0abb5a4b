use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean and standard error of a sampled statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub mean: f64,
    pub stderr: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub samples: u64,
}

impl SampleStats {
    fn from_column(values: impl Iterator<Item = f64> + Clone, samples: u64) -> Self {
        let s = samples as f64;
        let mean = values.clone().sum::<f64>() / s;
        let variance = if samples > 1 {
            values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (s - 1.0)
        } else {
            0.0
        };
        SampleStats {
            mean,
            stderr: (variance / s).sqrt(),
            variance,
            samples,
        }
    }
}

/// Runs `f` on sample indices `0..samples` in parallel and reduces each of
/// the `width` outputs in index order, so results do not depend on the
/// number of worker threads.
pub fn monte_carlo<F>(samples: u64, width: usize, f: F) -> Result<Vec<SampleStats>>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is needed".into()));
    }
    let rows: Vec<Vec<f64>> = (0..samples).into_par_iter().map(&f).collect::<Result<_>>()?;
    if let Some(bad) = rows.iter().position(|r| r.len() != width) {
        return Err(Error::Precondition(format!("sample {bad} returned the wrong number of values")));
    }
    Ok((0..width)
        .map(|j| SampleStats::from_column(rows.iter().map(|r| r[j]), samples))
        .collect())
}

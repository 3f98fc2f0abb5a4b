//! Symmetric Wigner tensors, Haar orthogonal matrices and deterministic
//! tensor families, all driven by reproducible seed streams.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensoreval::{checked_size, DenseTensor};

/// Independent, reproducible random streams addressed by `(purpose, index)`.
///
/// The ChaCha key is the triple itself, so a stream does not depend on which
/// other streams were drawn or in what order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedStream {
    root: u64,
}

impl SeedStream {
    pub fn new(root: u64) -> Self {
        SeedStream { root }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn rng(&self, purpose: u64, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.root.to_le_bytes());
        key[8..16].copy_from_slice(&purpose.to_le_bytes());
        key[16..24].copy_from_slice(&index.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }

    /// A child stream, for nesting experiments.
    pub fn child(&self, purpose: u64, index: u64) -> SeedStream {
        SeedStream::new(self.rng(purpose, index).random())
    }
}

/// Purpose tags used by the library.
pub mod purpose {
    pub const TENSOR: u64 = 1;
    pub const HAAR: u64 = 2;
    pub const RELABEL: u64 = 3;
    pub const EXPERIMENT: u64 = 4;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryLaw {
    Gaussian,
    Rademacher,
    Uniform,
}

impl EntryLaw {
    /// A centered draw with the given variance.
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R, variance: f64) -> f64 {
        let sd = variance.sqrt();
        match self {
            EntryLaw::Gaussian => sd * rng.sample::<f64, _>(StandardNormal),
            EntryLaw::Rademacher => {
                if rng.random::<bool>() {
                    sd
                } else {
                    -sd
                }
            }
            EntryLaw::Uniform => {
                let h = sd * 3f64.sqrt();
                rng.random_range(-h..h)
            }
        }
    }
}

impl FromStr for EntryLaw {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(EntryLaw::Gaussian),
            "rademacher" => Ok(EntryLaw::Rademacher),
            "uniform" => Ok(EntryLaw::Uniform),
            other => Err(Error::Unsupported(format!("entry law `{other}`"))),
        }
    }
}

impl fmt::Display for EntryLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryLaw::Gaussian => "gaussian",
            EntryLaw::Rademacher => "rademacher",
            EntryLaw::Uniform => "uniform",
        })
    }
}

/// Which variance profile the orbit entries get.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceProfile {
    /// `E X_i^2 = p / P_i`, with `P_i` the orbit size.
    #[default]
    Standard,
    /// `E X_i^2 = p! / P_i`.
    Factorial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub p: usize,
    pub n: usize,
    pub law: EntryLaw,
    pub seed: u64,
    #[serde(default)]
    pub profile: VarianceProfile,
}

/// `S_p`-orbits of `[N]^p`, keyed by sorted multi-index.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    p: usize,
    n: usize,
    orbit_of: Vec<u32>,
    /// Representative (sorted) multi-index per orbit.
    representatives: Vec<Vec<usize>>,
    /// Multiplicities `c_j` of each representative.
    multiplicities: Vec<Vec<usize>>,
}

impl OrbitTable {
    pub fn new(p: usize, n: usize) -> Result<Self> {
        let size = checked_size(p, n)?;
        let mut representatives = Vec::new();
        let mut id: HashMap<Vec<usize>, u32> = HashMap::new();
        let mut orbit_of = Vec::with_capacity(size);
        let mut idx = vec![0usize; p];
        for _ in 0..size {
            let mut key = idx.clone();
            key.sort_unstable();
            let next = id.len() as u32;
            let o = *id.entry(key.clone()).or_insert_with(|| {
                representatives.push(key);
                next
            });
            orbit_of.push(o);
            for k in (0..p).rev() {
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
            }
        }
        let multiplicities = representatives
            .iter()
            .map(|r| {
                let mut counts: Vec<usize> = Vec::new();
                for (i, x) in r.iter().enumerate() {
                    if i > 0 && r[i - 1] == *x {
                        *counts.last_mut().expect("nonempty") += 1;
                    } else {
                        counts.push(1);
                    }
                }
                counts
            })
            .collect();
        Ok(OrbitTable {
            p,
            n,
            orbit_of,
            representatives,
            multiplicities,
        })
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn orbit_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn orbit_of(&self, flat: usize) -> usize {
        self.orbit_of[flat] as usize
    }

    pub fn representative(&self, orbit: usize) -> &[usize] {
        &self.representatives[orbit]
    }

    /// `P_i = p! / prod c_j!`.
    pub fn orbit_size(&self, orbit: usize) -> f64 {
        factorial(self.p) / self.multiplicities[orbit].iter().map(|&c| factorial(c)).product::<f64>()
    }

    /// Variance of the unscaled entry `X_i` on this orbit.
    pub fn variance(&self, orbit: usize, profile: VarianceProfile) -> f64 {
        let prod: f64 = self.multiplicities[orbit].iter().map(|&c| factorial(c)).product();
        match profile {
            VarianceProfile::Standard => prod / factorial(self.p - 1),
            VarianceProfile::Factorial => prod,
        }
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// Draws `W = X / N^((p-1)/2)` with `X` constant on `S_p`-orbits.
#[derive(Clone, Debug)]
pub struct GoteSampler {
    spec: EnsembleSpec,
    table: Arc<OrbitTable>,
    variances: Vec<f64>,
    scale: f64,
}

impl GoteSampler {
    pub fn new(spec: EnsembleSpec) -> Result<Self> {
        if spec.p == 0 || spec.n == 0 {
            return Err(Error::Precondition("order and dimension must be positive".into()));
        }
        let table = Arc::new(OrbitTable::new(spec.p, spec.n)?);
        let variances = (0..table.orbit_count())
            .map(|o| table.variance(o, spec.profile))
            .collect();
        Ok(GoteSampler {
            spec,
            table,
            variances,
            scale: (spec.n as f64).powf(-((spec.p - 1) as f64) / 2.0),
        })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn table(&self) -> &OrbitTable {
        &self.table
    }

    /// Unscaled orbit values `X`, one per orbit.
    pub fn draw_orbits<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.variances
            .iter()
            .map(|&var| self.spec.law.draw(rng, var))
            .collect()
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> DenseTensor {
        let vals: Vec<f64> = self.draw_orbits(rng).into_iter().map(|x| x * self.scale).collect();
        let data = self.table.orbit_of.iter().map(|&o| vals[o as usize]).collect();
        DenseTensor::new(self.spec.p, self.spec.n, data).expect("shape fixed by the table")
    }

    /// Sample `index` of the stream rooted at the spec's seed.
    pub fn sample(&self, index: u64) -> DenseTensor {
        self.sample_with(&mut SeedStream::new(self.spec.seed).rng(purpose::TENSOR, index))
    }
}

pub fn sample_symmetric_tensor(spec: EnsembleSpec) -> Result<DenseTensor> {
    Ok(GoteSampler::new(spec)?.sample(0))
}

/// Haar orthogonal matrix: QR of a Gaussian matrix with column signs fixed
/// so that `R` has a nonnegative diagonal.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseTensor {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    DenseTensor::from_fn(2, n, |i| q[(i[0], i[1])]).expect("an n x n matrix fits")
}

pub fn sample_haar_orthogonal(n: usize, seed: u64) -> Result<DenseTensor> {
    if n == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    Ok(haar_orthogonal(n, &mut SeedStream::new(seed).rng(purpose::HAAR, 0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeterministicKind {
    Identity,
    Diagonal,
    /// `v^{⊗p}` with `v = N^{1/(2p)} e_1`, so the degree-p melon evaluates to 1.
    RankOne,
}

impl FromStr for DeterministicKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(DeterministicKind::Identity),
            "diagonal" => Ok(DeterministicKind::Diagonal),
            "rank_one" => Ok(DeterministicKind::RankOne),
            other => Err(Error::Unsupported(format!("family `{other}`"))),
        }
    }
}

pub fn make_deterministic_family(kind: DeterministicKind, p: usize, n: usize) -> Result<DenseTensor> {
    match kind {
        DeterministicKind::Identity => {
            if p != 2 {
                return Err(Error::Precondition("the identity family has order 2".into()));
            }
            Ok(DenseTensor::identity_matrix(n))
        }
        DeterministicKind::Diagonal => DenseTensor::from_fn(p, n, |i| f64::from(u8::from(i.iter().all(|&x| x == i[0])))),
        DeterministicKind::RankOne => {
            let v = (n as f64).powf(1.0 / (2.0 * p as f64));
            let mut t = DenseTensor::zeros(p, n)?;
            t.data_mut()[0] = v.powi(p as i32);
            Ok(t)
        }
    }
}

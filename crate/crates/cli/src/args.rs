//! Command-line arguments and the optional `key = value` config file.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tensorfree::randgen::{EntryLaw, VarianceProfile};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "tensorfree", version, about = "Trace invariants, moments and freeness checks for random tensors")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// List maps up to equivalence.
    EnumerateMaps(EnumerateArgs),
    /// Evaluate trace invariants of tensors read from files.
    Eval(EvalArgs),
    /// Monte Carlo moments of GOTE tensors over an N grid.
    SampleMoments(SampleArgs),
    /// Schwinger-Dyson residual checks.
    SdCheck(SdArgs),
    /// Asymptotic freeness statistic over an N grid.
    FreenessCheck(FreenessArgs),
    /// Moments and free cumulants of GOTE tensors.
    Cumulants(CumulantArgs),
    /// Large-N limit moments of GOTE tensors.
    Limit(LimitArgs),
    /// Count melonic maps against Fuss-Catalan numbers.
    Census(CensusArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::EnumerateMaps(_) => "enumerate-maps",
            Command::Eval(_) => "eval",
            Command::SampleMoments(_) => "sample-moments",
            Command::SdCheck(_) => "sd-check",
            Command::FreenessCheck(_) => "freeness-check",
            Command::Cumulants(_) => "cumulants",
            Command::Limit(_) => "limit",
            Command::Census(_) => "census",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::EnumerateMaps(a) => &a.common,
            Command::Eval(a) => &a.common,
            Command::SampleMoments(a) => &a.common,
            Command::SdCheck(a) => &a.common,
            Command::FreenessCheck(a) => &a.common,
            Command::Cumulants(a) => &a.common,
            Command::Limit(a) => &a.common,
            Command::Census(a) => &a.common,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    Gaussian,
    Rademacher,
    Uniform,
}

impl From<Law> for EntryLaw {
    fn from(l: Law) -> Self {
        match l {
            Law::Gaussian => EntryLaw::Gaussian,
            Law::Rademacher => EntryLaw::Rademacher,
            Law::Uniform => EntryLaw::Uniform,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Standard,
    Factorial,
}

impl From<Profile> for VarianceProfile {
    fn from(p: Profile) -> Self {
        match p {
            Profile::Standard => VarianceProfile::Standard,
            Profile::Factorial => VarianceProfile::Factorial,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SdKind {
    Haar,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// A deterministic diagonal matrix against a GOTE matrix.
    Matrix,
    /// A diagonal order-3 tensor against a Haar-rotated copy.
    Rotated,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Report format; census defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Flat `key = value` file; flags on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads for sampling. Values never depend on it.
    #[arg(long)]
    #[serde(skip)]
    pub workers: Option<usize>,
    /// Leave the timestamp out of JSON reports.
    #[arg(long)]
    #[serde(skip)]
    pub no_timestamp: bool,
}

/// Options for Monte Carlo subcommands.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Sampling {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = Law::Gaussian)]
    pub law: Law,
}

/// A single dimension or a comma-separated grid.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Grid {
    #[arg(long = "n-dim", conflicts_with = "n_grid")]
    pub n_dim: Option<usize>,
    #[arg(long = "n-grid", value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
}

impl Grid {
    /// The grid, checked to be non-empty, positive and strictly increasing.
    pub fn resolve(&self, default: &[usize]) -> Result<Vec<usize>, CliError> {
        let grid = match (&self.n_dim, &self.n_grid) {
            (Some(n), _) => vec![*n],
            (None, Some(g)) => g.clone(),
            (None, None) => default.to_vec(),
        };
        if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage(format!("N grid {grid:?} must be positive and strictly increasing")));
        }
        Ok(grid)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct EnumerateArgs {
    /// Vertex degrees; all maps with these degrees are listed.
    #[arg(long, value_delimiter = ',', conflicts_with = "colors")]
    pub degrees: Option<Vec<usize>>,
    /// Colors as `name:arity`; connected maps within the size budget are listed.
    #[arg(long, value_delimiter = ',')]
    pub colors: Option<Vec<String>>,
    #[arg(long, default_value_t = 4)]
    pub max_vertices: usize,
    #[arg(long, default_value_t = 8)]
    pub max_edges: usize,
    /// Keep connected maps only.
    #[arg(long)]
    pub connected: bool,
    /// Also write the maps as a map file.
    #[arg(long)]
    pub maps_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    /// Map file, one map per line.
    #[arg(long)]
    pub map: PathBuf,
    /// Tensor file, or `color=file`. A bare file serves every color.
    #[arg(long, required = true)]
    pub tensor: Vec<String>,
    /// Expected tensor dimension; needed for CSV tensors.
    #[arg(long = "n-dim")]
    pub n_dim: Option<usize>,
    /// Compare against naive index summation.
    #[arg(long)]
    pub check: bool,
    /// Relative tolerance for `--check`.
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
    /// Write the result tensor of a single open map here.
    #[arg(long)]
    pub tensor_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    /// Map file; defaults to the melon of order `--p`.
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: Grid,
    #[command(flatten)]
    #[serde(flatten)]
    pub sampling: Sampling,
    #[arg(long, value_enum, default_value_t = Profile::Standard)]
    pub profile: Profile,
    /// Also report exact Wick values where they are affordable.
    #[arg(long)]
    pub exact: bool,
    /// Fail when a sampled mean is more than this many stderr from its exact value.
    #[arg(long, requires = "exact")]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct SdArgs {
    #[arg(long, value_enum, default_value_t = SdKind::Haar)]
    pub kind: SdKind,
    /// Map file; defaults to built-in test maps.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Fixed tensors as `color=file` for the maps of `--map`.
    #[arg(long)]
    pub tensor: Vec<String>,
    /// Color of the Haar matrix.
    #[arg(long, default_value = "u")]
    pub u_color: String,
    /// Order of the default Gaussian map.
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: Grid,
    #[command(flatten)]
    #[serde(flatten)]
    pub sampling: Sampling,
    /// Largest accepted |residual| / stderr.
    #[arg(long, default_value_t = 4.0)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct FreenessArgs {
    #[arg(long, value_enum, default_value_t = Pairing::Matrix)]
    pub pairing: Pairing,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: Grid,
    #[command(flatten)]
    #[serde(flatten)]
    pub sampling: Sampling,
    /// Largest accepted statistic at the top of the grid.
    #[arg(long, default_value_t = 0.1)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct CumulantArgs {
    /// Map file; defaults to all connected maps within the budget.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// GOTE colors as `name:arity`.
    #[arg(long, value_delimiter = ',', default_value = "w:2")]
    pub colors: Vec<String>,
    #[arg(long, default_value_t = 3)]
    pub max_vertices: usize,
    #[arg(long, default_value_t = 6)]
    pub max_edges: usize,
    /// Exact finite-N moments; the large-N limit when absent.
    #[arg(long = "n-dim")]
    pub n_dim: Option<usize>,
    #[arg(long, value_enum, default_value_t = Profile::Standard)]
    pub profile: Profile,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct LimitArgs {
    /// Map file; defaults to the melon of order `--p`.
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[arg(long, value_enum, default_value_t = Profile::Standard)]
    pub profile: Profile,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct CensusArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub k: usize,
    /// Emit rows for k through this value.
    #[arg(long)]
    pub k_max: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

/// Turns `key = value` lines into flags placed before the user's own, so
/// that the command line wins. A `command` key supplies the subcommand.
pub fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = argv.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let mut command = None;
    let mut flags = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected `key = value`", path.display(), n + 1)))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key == "command" {
            command = Some(value.to_string());
        } else if key == "config" {
            return Err(CliError::Usage("config files cannot include other config files".into()));
        } else {
            match value {
                "true" => flags.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => flags.push(OsString::from(format!("--{key}={value}"))),
            }
        }
    }
    let has_subcommand = argv.get(1).is_some_and(|a| !a.to_string_lossy().starts_with('-'));
    let mut out = vec![argv[0].clone()];
    let rest = if has_subcommand {
        out.push(argv[1].clone());
        &argv[2..]
    } else {
        let c = command.ok_or_else(|| CliError::Usage("no subcommand given on the command line or in the config".into()))?;
        out.push(OsString::from(c));
        &argv[1..]
    };
    out.extend(flags);
    out.extend(rest.iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn flags_win_over_config() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# experiment\ncommand = census\np = 3\nk = 2\nno_timestamp = true").unwrap();
        let path = f.path().to_str().unwrap();
        let argv = merge_config(os(&["tf", "--config", path, "--k", "4"])).unwrap();
        let cli = Cli::try_parse_from(argv).unwrap();
        let Command::Census(c) = cli.command else { panic!("wrong subcommand") };
        assert_eq!((c.p, c.k), (3, 4));
        assert!(c.common.no_timestamp);
    }

    #[test]
    fn grid_must_increase() {
        let g = Grid {
            n_dim: None,
            n_grid: Some(vec![8, 8]),
        };
        assert!(g.resolve(&[1]).is_err());
        let g = Grid { n_dim: None, n_grid: None };
        assert_eq!(g.resolve(&[4, 8]).unwrap(), vec![4, 8]);
    }
}

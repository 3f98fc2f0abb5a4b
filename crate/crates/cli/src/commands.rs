//! One function per subcommand, each producing a report.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};
use tensorfree::combmap::{
    canonical_form, closed_maps_with_degrees, connected_colored_maps, parse_maps, serialize_map,
};
use tensorfree::distribution::{cumulant_transform, empirical_distribution, freeness_statistic, AbstractDistribution};
use tensorfree::moments::{
    exact_gaussian_moment_rational, gaussian_residual, haar_residual, limit_moment_gaussian, monte_carlo,
    GaussianEnsemble,
};
use tensorfree::poset::{is_melonic, melonic_census};
use tensorfree::randgen::{purpose, EnsembleSpec, EntryLaw, GoteSampler, SeedStream};
use tensorfree::scalar::BigRational;
use tensorfree::tensoreval::{eval_invariant, naive_eval, read_tensor, read_tensor_csv, write_tensor, DenseTensor};
use tensorfree::{ColoredMap, CombMap, Error, Scalar};

use crate::args::*;
use crate::error::CliError;
use crate::fixtures;
use crate::report::{Report, Status, Table};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: &Command) -> Result<Report> {
    let (status, table) = match command {
        Command::EnumerateMaps(a) => enumerate(a)?,
        Command::Eval(a) => eval(a)?,
        Command::SampleMoments(a) => sample_moments(a)?,
        Command::SdCheck(a) => sd_check(a)?,
        Command::FreenessCheck(a) => freeness_check(a)?,
        Command::Cumulants(a) => cumulants(a)?,
        Command::Limit(a) => limit(a)?,
        Command::Census(a) => census(a)?,
    };
    let mut config = serde_json::to_value(command)?;
    // Drop the enum wrapper so the echo is the flat option set.
    if let Value::Object(mut outer) = config {
        config = outer.remove(command.name()).unwrap_or(Value::Null);
    }
    Ok(Report {
        command: command.name(),
        config,
        status,
        table,
    })
}

fn read_maps(path: &Path) -> Result<Vec<ColoredMap>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let maps = parse_maps(&text)?;
    if maps.is_empty() {
        return Err(CliError::Usage(format!("{}: no maps found", path.display())));
    }
    Ok(maps)
}

fn read_tensor_file(path: &Path, dim: Option<usize>) -> Result<DenseTensor> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let reader = BufReader::new(file);
    let t = if path.extension().is_some_and(|e| e == "csv") {
        read_tensor_csv(reader, dim)?
    } else {
        read_tensor(reader)?
    };
    if let Some(n) = dim {
        if t.dim() != n {
            return Err(CliError::Usage(format!("{}: dimension {} but --n-dim is {n}", path.display(), t.dim())));
        }
    }
    Ok(t)
}

/// Parses `color=file` assignments; a bare file is stored under the empty color.
fn tensor_assignments(specs: &[String], dim: Option<usize>) -> Result<HashMap<String, DenseTensor>> {
    let mut out = HashMap::new();
    for spec in specs {
        let (color, path) = match spec.split_once('=') {
            Some((c, p)) => (c.to_string(), p),
            None => (String::new(), spec.as_str()),
        };
        if out.insert(color.clone(), read_tensor_file(Path::new(path), dim)?).is_some() {
            return Err(CliError::Usage(format!("tensor for color `{color}` given twice")));
        }
    }
    Ok(out)
}

fn tensors_for(cm: &ColoredMap, assigned: &HashMap<String, DenseTensor>) -> Result<HashMap<String, DenseTensor>> {
    let mut out = HashMap::new();
    for c in cm.colors() {
        let t = assigned
            .get(c)
            .or_else(|| assigned.get(""))
            .ok_or_else(|| CliError::Usage(format!("no tensor given for color `{c}`")))?;
        out.insert(c.clone(), t.clone());
    }
    Ok(out)
}

/// `name:arity` pairs.
fn parse_colors(specs: &[String]) -> Result<Vec<(String, usize)>> {
    specs
        .iter()
        .map(|s| {
            let (name, arity) = s
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("color `{s}` should be name:arity")))?;
            let arity = arity
                .parse()
                .map_err(|_| CliError::Usage(format!("color `{s}` has a bad arity")))?;
            Ok((name.to_string(), arity))
        })
        .collect()
}

fn map_row_text(cm: &ColoredMap) -> Value {
    json!(serialize_map(cm))
}

fn rational_cell(x: &BigRational) -> Value {
    json!(x.to_string())
}

fn enumerate(a: &EnumerateArgs) -> Result<(Status, Table)> {
    let maps: Vec<ColoredMap> = match (&a.degrees, &a.colors) {
        (Some(degrees), _) => {
            let uniform = degrees.windows(2).all(|w| w[0] == w[1]);
            let colors: Vec<String> =
                degrees.iter().map(|d| if uniform { "w".into() } else { format!("d{d}") }).collect();
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for m in closed_maps_with_degrees(degrees)? {
                let canon = canonical_form(&ColoredMap::new(m, colors.clone())?);
                if seen.insert(canon.key) {
                    out.push(canon.map);
                }
            }
            out
        }
        (None, Some(colors)) => {
            let colors = parse_colors(colors)?;
            let arity: Vec<(&str, usize)> = colors.iter().map(|(c, a)| (c.as_str(), *a)).collect();
            connected_colored_maps(&arity, a.max_vertices, a.max_edges)?
        }
        (None, None) => return Err(CliError::Usage("give --degrees or --colors".into())),
    };
    let maps: Vec<ColoredMap> = maps.into_iter().filter(|m| !a.connected || m.map().gamma() == 1).collect();
    if let Some(path) = &a.maps_out {
        let text: String = maps.iter().map(|m| serialize_map(m) + "\n").collect();
        fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    }
    let mut table = Table::new(&["map", "vertices", "edges", "components", "melonic"]);
    for m in &maps {
        table.push(vec![
            map_row_text(m),
            json!(m.map().vertex_count()),
            json!(m.map().edge_count()),
            json!(m.map().gamma()),
            json!(is_melonic(m.map())),
        ]);
    }
    Ok((Status::Ok, table))
}

fn abs_tensors(t: &HashMap<String, DenseTensor>) -> Result<HashMap<String, DenseTensor>> {
    t.iter()
        .map(|(c, x)| {
            let data = x.data().iter().map(|v| v.abs()).collect();
            Ok((c.clone(), DenseTensor::new(x.order(), x.dim(), data)?))
        })
        .collect()
}

fn eval(a: &EvalArgs) -> Result<(Status, Table)> {
    let maps = read_maps(&a.map)?;
    let assigned = tensor_assignments(&a.tensor, a.n_dim)?;
    if a.tensor_out.is_some() && maps.len() != 1 {
        return Err(CliError::Usage("--tensor-out needs a map file with a single map".into()));
    }
    let mut table = Table::new(&["map", "N", "order", "value", "naive", "rel_err"]);
    let mut passed = true;
    for cm in &maps {
        let tensors = tensors_for(cm, &assigned)?;
        let result = eval_invariant(cm, &tensors)?;
        let n = tensors.values().next().map_or(0, DenseTensor::dim);
        let value = result.as_scalar();
        let (naive, rel) = if a.check {
            let data: Vec<&[f64]> = cm.colors().iter().map(|c| tensors[c].data()).collect();
            let slow = naive_eval(cm.map(), &data, n)?;
            let abs = abs_tensors(&tensors)?;
            let abs_data: Vec<&[f64]> = cm.colors().iter().map(|c| abs[c].data()).collect();
            let scale = naive_eval(cm.map(), &abs_data, n)?;
            let mut worst: f64 = 0.0;
            for ((x, y), s) in result.data().iter().zip(&slow).zip(&scale) {
                worst = worst.max((x - y).abs() / s.max(y.abs()).max(f64::MIN_POSITIVE));
            }
            passed &= worst <= a.tolerance;
            (if value.is_some() { json!(slow[0]) } else { Value::Null }, json!(worst))
        } else {
            (Value::Null, Value::Null)
        };
        if let Some(path) = &a.tensor_out {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            write_tensor(std::io::BufWriter::new(file), &result)?;
        }
        table.push(vec![
            map_row_text(cm),
            json!(n),
            json!(result.order()),
            json!(value),
            naive,
            rel,
        ]);
    }
    let status = if a.check { Status::from_check(passed) } else { Status::Ok };
    Ok((status, table))
}

/// Independent GOTE samplers for every color of the maps, in color order.
fn samplers(maps: &[ColoredMap], n: usize, law: EntryLaw, args_profile: Profile) -> Result<Vec<(String, GoteSampler)>> {
    let mut arity: BTreeMap<String, usize> = BTreeMap::new();
    for cm in maps {
        for (v, c) in cm.colors().iter().enumerate() {
            arity.insert(c.clone(), cm.map().degree(v));
        }
    }
    arity
        .into_iter()
        .map(|(c, p)| {
            let spec = EnsembleSpec {
                p,
                n,
                law,
                seed: 0,
                profile: args_profile.into(),
            };
            Ok((c, GoteSampler::new(spec)?))
        })
        .collect()
}

fn all_colors(maps: &[ColoredMap]) -> Vec<String> {
    let set: std::collections::BTreeSet<&String> = maps.iter().flat_map(|m| m.colors()).collect();
    set.into_iter().cloned().collect()
}

fn default_or_file(map: &Option<std::path::PathBuf>, p: usize) -> Result<Vec<ColoredMap>> {
    match map {
        Some(path) => read_maps(path),
        None => Ok(vec![ColoredMap::uniform(CombMap::melon(p, None)?, "w")?]),
    }
}

fn sample_moments(a: &SampleArgs) -> Result<(Status, Table)> {
    let maps = default_or_file(&a.map, a.p)?;
    let grid = a.grid.resolve(&[8, 16, 32])?;
    let law: EntryLaw = a.sampling.law.into();
    let ensemble = GaussianEnsemble::new(all_colors(&maps), a.profile.into());
    let limits: Vec<Value> = maps
        .iter()
        .map(|cm| {
            Ok(match limit_moment_gaussian(cm, &ensemble, &AbstractDistribution::<BigRational>::new()) {
                Ok(v) => json!(v.to_f64()),
                Err(Error::Capacity(_)) => Value::Null,
                Err(e) => return Err(e.into()),
            })
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["map", "N", "mean", "stderr", "samples", "seed", "exact", "z", "limit"]);
    let mut passed = true;
    let stream = SeedStream::new(a.sampling.seed);
    for &n in &grid {
        let samplers = samplers(&maps, n, law, a.profile)?;
        let stats = monte_carlo(a.sampling.samples, maps.len(), |i| {
            let mut rng = stream.rng(purpose::TENSOR, i);
            let tensors: HashMap<String, DenseTensor> =
                samplers.iter().map(|(c, s)| (c.clone(), s.sample_with(&mut rng))).collect();
            maps.iter()
                .map(|cm| tensorfree::tensoreval::eval_closed(cm, &tensors))
                .collect()
        })?;
        for ((cm, s), lim) in maps.iter().zip(&stats).zip(&limits) {
            // Wick's formula only describes Gaussian entries.
            let exact = if a.exact && law == EntryLaw::Gaussian {
                match exact_gaussian_moment_rational(cm, n, &ensemble, &HashMap::new()) {
                    Ok(v) => Some(v.to_f64()),
                    Err(Error::Capacity(_)) => None,
                    Err(e) => return Err(e.into()),
                }
            } else {
                None
            };
            let z = exact.map(|x| (s.mean - x) / s.stderr);
            if let (Some(tol), Some(z)) = (a.tolerance, z) {
                passed &= z.abs() <= tol;
            }
            table.push(vec![
                map_row_text(cm),
                json!(n),
                json!(s.mean),
                json!(s.stderr),
                json!(s.samples),
                json!(a.sampling.seed),
                json!(exact),
                json!(z),
                lim.clone(),
            ]);
        }
    }
    let status = if a.tolerance.is_some() { Status::from_check(passed) } else { Status::Ok };
    Ok((status, table))
}

fn sd_check(a: &SdArgs) -> Result<(Status, Table)> {
    let grid = a.grid.resolve(&[16])?;
    let seed = a.sampling.seed;
    let samples = a.sampling.samples;
    let file_tensors = tensor_assignments(&a.tensor, None)?;
    let maps = match (&a.map, a.kind) {
        (Some(path), _) => read_maps(path)?,
        (None, SdKind::Haar) => fixtures::haar_maps()?,
        (None, SdKind::Gaussian) => fixtures::gaussian_maps(a.p)?,
    };
    let fixed_for = |n: usize| -> Result<HashMap<String, DenseTensor>> {
        if a.map.is_none() && a.kind == SdKind::Haar {
            return Ok(fixtures::haar_fixed(n)?);
        }
        if let Some((c, t)) = file_tensors.iter().find(|(_, t)| t.dim() != n) {
            return Err(CliError::Usage(format!("tensor for `{c}` has dimension {} but N is {n}", t.dim())));
        }
        Ok(file_tensors.clone())
    };
    let mut table = Table::new(&["map", "N", "residual", "stderr", "ratio", "samples", "seed"]);
    // Per map: ratio at each N and |residual| at each N.
    let mut history: Vec<Vec<(f64, f64)>> = vec![Vec::new(); maps.len()];
    for &n in &grid {
        let fixed = fixed_for(n)?;
        for (j, cm) in maps.iter().enumerate() {
            let r = match a.kind {
                SdKind::Haar => haar_residual(cm, &a.u_color, &fixed, n, samples, seed)?,
                SdKind::Gaussian => {
                    let ensemble = GaussianEnsemble::new(["w"], Profile::Standard.into()).with_law(a.sampling.law.into());
                    gaussian_residual(cm, &ensemble, &fixed, n, samples, seed)?
                }
            };
            let ratio = if r.stderr > 0.0 { r.value.abs() / r.stderr } else if r.value == 0.0 { 0.0 } else { f64::INFINITY };
            history[j].push((ratio, r.value.abs()));
            table.push(vec![
                json!(r.map_canonical),
                json!(n),
                json!(r.value),
                json!(r.stderr),
                json!(ratio),
                json!(samples),
                json!(seed),
            ]);
        }
    }
    // The Haar identity is exact at every N. The Gaussian one drops terms of
    // order 1/N, so along a grid the residual only has to shrink.
    let passed = history.iter().all(|h| {
        let (last_ratio, last_abs) = h[h.len() - 1];
        match a.kind {
            SdKind::Haar => h.iter().all(|&(r, _)| r <= a.tolerance),
            SdKind::Gaussian => last_ratio <= a.tolerance || (h.len() > 1 && last_abs < h[0].1),
        }
    });
    Ok((Status::from_check(passed), table))
}

fn freeness_check(a: &FreenessArgs) -> Result<(Status, Table)> {
    let grid = a.grid.resolve(&[8, 16, 32])?;
    let mut table = Table::new(&["N", "statistic", "qualifying", "budget", "samples", "seed"]);
    let mut stats = Vec::new();
    for &n in &grid {
        let setup = match a.pairing {
            Pairing::Matrix => fixtures::matrix_pair(n, a.sampling.law.into())?,
            Pairing::Rotated => fixtures::rotated_pair(n)?,
        };
        let emp = empirical_distribution(&setup.sampler, &setup.colors, &setup.budget, a.sampling.samples, a.sampling.seed)?;
        let report = freeness_statistic(&emp.distribution, &setup.reference, &setup.budget, 1e-9)?;
        stats.push(report.statistic);
        table.push(vec![
            json!(n),
            json!(report.statistic),
            json!(report.rows.iter().filter(|r| r.qualifies).count()),
            json!(setup.budget.len()),
            json!(a.sampling.samples),
            json!(a.sampling.seed),
        ]);
    }
    let decreasing = stats.windows(2).all(|w| w[1] < w[0]);
    let passed = decreasing && stats.last().is_some_and(|&s| s < a.tolerance);
    Ok((Status::from_check(passed), table))
}

fn cumulants(a: &CumulantArgs) -> Result<(Status, Table)> {
    let colors = parse_colors(&a.colors)?;
    let maps = match &a.map {
        Some(path) => read_maps(path)?,
        None => {
            let arity: Vec<(&str, usize)> = colors.iter().map(|(c, a)| (c.as_str(), *a)).collect();
            connected_colored_maps(&arity, a.max_vertices, a.max_edges)?
        }
    };
    let ensemble = GaussianEnsemble::new(colors.iter().map(|(c, _)| c.clone()), a.profile.into());
    let n = a.n_dim;
    let rule = move |m: &ColoredMap| -> tensorfree::Result<BigRational> {
        match n {
            Some(n) => exact_gaussian_moment_rational(m, n, &ensemble, &HashMap::new()),
            None => limit_moment_gaussian(m, &ensemble, &AbstractDistribution::new()),
        }
    };
    let mut dist = AbstractDistribution::new();
    for (c, arity) in &colors {
        dist.declare(c, *arity, c)?;
    }
    let dist = dist.with_rule(Arc::new(rule));
    let mut table = Table::new(&["map", "N", "moment", "moment_f64", "cumulant", "cumulant_f64"]);
    for cm in &maps {
        let moment = dist.value(cm)?;
        let cumulant = cumulant_transform(&dist, cm)?;
        table.push(vec![
            map_row_text(cm),
            json!(n),
            rational_cell(&moment),
            json!(moment.to_f64()),
            rational_cell(&cumulant),
            json!(cumulant.to_f64()),
        ]);
    }
    Ok((Status::Ok, table))
}

fn limit(a: &LimitArgs) -> Result<(Status, Table)> {
    let maps = default_or_file(&a.map, a.p)?;
    let ensemble = GaussianEnsemble::new(all_colors(&maps), a.profile.into());
    let mut table = Table::new(&["map", "limit", "limit_f64"]);
    for cm in &maps {
        let v = limit_moment_gaussian(cm, &ensemble, &AbstractDistribution::<BigRational>::new())?;
        table.push(vec![map_row_text(cm), rational_cell(&v), json!(v.to_f64())]);
    }
    Ok((Status::Ok, table))
}

fn census(a: &CensusArgs) -> Result<(Status, Table)> {
    let last = a.k_max.unwrap_or(a.k);
    if last < a.k {
        return Err(CliError::Usage("--k-max is below --k".into()));
    }
    let mut table = Table::new(&["p", "k", "enumerated", "fuss_catalan"]);
    let mut passed = true;
    for k in a.k..=last {
        let row = melonic_census(a.p, k)?;
        let fc: Value = u64::try_from(&row.fuss_catalan).map_or_else(|_| json!(row.fuss_catalan.to_string()), |x| json!(x));
        passed &= row.all_melonic && json!(row.enumerated) == fc;
        table.push(vec![json!(row.p), json!(row.k), json!(row.enumerated), fc]);
    }
    Ok((Status::from_check(passed), table))
}

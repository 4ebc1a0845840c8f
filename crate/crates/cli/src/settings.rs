//! Validation of parsed arguments into typed settings. Nothing here touches
//! data files beyond checking that they exist.

use std::path::{Path, PathBuf};

use lwr::data::DatasetFiles;
use lwr::{RejectionCost, TrainConfig};
use serde::Serialize;

use crate::args::{Common, FitArgs, SolverArg, TestFiles, TrainFiles};
use crate::error::{CliError, CliResult};

pub const DEFAULT_GRID: [f64; 5] = [1e-3, 1e-2, 1e-1, 1.0, 10.0];
pub const DEFAULT_COSTS: [f64; 4] = [0.1, 0.2, 0.3, 0.4];

fn existing(flag: &str, path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::config(format!("--{flag}: no such file {}", path.display())))
    }
}

/// All three files of a dataset, or none of them.
fn triple(
    prefix: &str,
    labels: &Option<PathBuf>,
    phi: &Option<PathBuf>,
    phi_prime: &Option<PathBuf>,
) -> CliResult<Option<DatasetFiles>> {
    match (labels, phi, phi_prime) {
        (None, None, None) => Ok(None),
        (Some(l), Some(p), Some(pp)) => {
            existing(&format!("{prefix}-labels"), l)?;
            existing(&format!("{prefix}-phi"), p)?;
            existing(&format!("{prefix}-phi-prime"), pp)?;
            Ok(Some(DatasetFiles {
                labels: l.clone(),
                phi: p.clone(),
                phi_prime: pp.clone(),
            }))
        }
        _ => {
            let missing: Vec<String> = [("labels", labels), ("phi", phi), ("phi-prime", phi_prime)]
                .iter()
                .filter(|(_, v)| v.is_none())
                .map(|(k, _)| format!("--{prefix}-{k}"))
                .collect();
            Err(CliError::config(format!("missing {}", missing.join(", "))))
        }
    }
}

pub fn train_files(files: &TrainFiles) -> CliResult<(DatasetFiles, Option<DatasetFiles>)> {
    let train = triple("train", &files.train_labels, &files.train_phi, &files.train_phi_prime)?
        .ok_or_else(|| CliError::config("missing --train-labels, --train-phi, --train-phi-prime"))?;
    let val = triple("val", &files.val_labels, &files.val_phi, &files.val_phi_prime)?;
    Ok((train, val))
}

pub fn test_files(files: &TestFiles) -> CliResult<Option<DatasetFiles>> {
    triple("test", &files.test_labels, &files.test_phi, &files.test_phi_prime)
}

pub fn out_dir(common: &Common) -> CliResult<PathBuf> {
    let dir = common
        .out_dir
        .clone()
        .ok_or_else(|| CliError::config("missing --out-dir"))?;
    if dir.exists() && !dir.is_dir() {
        return Err(CliError::config(format!("--out-dir {} is not a directory", dir.display())));
    }
    Ok(dir)
}

pub fn optional_file(flag: &str, path: &Option<PathBuf>) -> CliResult<Option<PathBuf>> {
    if let Some(p) = path {
        existing(flag, p)?;
    }
    Ok(path.clone())
}

pub fn parse_list(flag: &str, text: &str) -> CliResult<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::config(format!("--{flag}: `{s}` is not a finite number")))
        })
        .collect::<CliResult<_>>()?;
    if values.is_empty() {
        return Err(CliError::config(format!("--{flag} is empty")));
    }
    Ok(values)
}

/// Ascending, distinct costs in (0, 1/2).
pub fn costs(text: Option<&str>) -> CliResult<Vec<RejectionCost>> {
    let mut values = match text {
        Some(t) => parse_list("c-list", t)?,
        None => DEFAULT_COSTS.to_vec(),
    };
    values.sort_by(f64::total_cmp);
    if let Some(w) = values.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::config(format!("--c-list repeats {}", w[0])));
    }
    values
        .into_iter()
        .map(|c| RejectionCost::new(c).map_err(|e| CliError::config(format!("--c-list: {e}"))))
        .collect()
}

pub fn grid(flag: &str, text: Option<&str>) -> CliResult<Vec<f64>> {
    let values = match text {
        Some(t) => parse_list(flag, t)?,
        None => DEFAULT_GRID.to_vec(),
    };
    if let Some(v) = values.iter().find(|v| **v <= 0.0) {
        return Err(CliError::config(format!("--{flag}: {v} is not positive")));
    }
    Ok(values)
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSettings {
    pub costs: Vec<RejectionCost>,
    pub lambdas: Vec<f64>,
    pub lambda_primes: Vec<f64>,
    pub normalize: bool,
    pub baselines: bool,
    pub probabilities: Option<PathBuf>,
    pub train_config: TrainConfig,
    pub seed: u64,
}

pub fn fit_settings(fit: &FitArgs, seed: u64) -> CliResult<FitSettings> {
    let mut train_config = match fit.solver {
        SolverArg::InteriorPoint => TrainConfig::default(),
        SolverArg::Subgradient => TrainConfig::subgradient(),
    };
    if let Some(n) = fit.max_iterations {
        train_config.max_iterations = n;
    }
    if let Some(t) = fit.tolerance {
        train_config.tolerance = t;
    }
    train_config.seed = seed;
    train_config
        .validate()
        .map_err(|e| CliError::config(e.to_string()))?;
    Ok(FitSettings {
        costs: costs(fit.c_list.as_deref())?,
        lambdas: grid("lambda-grid", fit.lambda_grid.as_deref())?,
        lambda_primes: grid("lambda-prime-grid", fit.lambda_prime_grid.as_deref())?,
        normalize: fit.normalize,
        baselines: fit.baselines,
        probabilities: optional_file("probabilities", &fit.probabilities)?,
        train_config,
        seed,
    })
}

//! Model files and buffered, atomic output writing.

use std::fs;
use std::path::{Path, PathBuf};

use lwr::baselines::CalibratedLinearModel;
use lwr::data::{io::write_atomic, ZScore};
use lwr::evaluation::CurveRow;
use lwr::{Dataset, LwrModel};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const CURVE_HEADER: &str = "method,c,rejection_rate,accuracy,risk_per_sample";
pub const UNDEFINED: &str = "NA";

/// Training-split z-score maps for both feature spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub phi: ZScore,
    pub phi_prime: ZScore,
}

impl Normalization {
    pub fn fit(train: &Dataset) -> Self {
        Normalization {
            phi: ZScore::fit(train.phi()),
            phi_prime: ZScore::fit(train.phi_prime()),
        }
    }

    pub fn apply(&self, data: &Dataset) -> lwr::Result<Dataset> {
        data.with_features(self.phi.apply(data.phi())?, self.phi_prime.apply(data.phi_prime())?)
    }
}

pub fn normalized(norm: &Option<Normalization>, data: &Dataset) -> CliResult<Dataset> {
    match norm {
        Some(n) => n.apply(data).map_err(|e| CliError::lib("normalization", e)),
        None => Ok(data.clone()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lwr,
    Svm,
    External,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Lwr => "lwr",
            Method::Svm => "svm",
            Method::External => "external",
        }
    }
}

/// One selected model for one rejection cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum ModelFile {
    Lwr {
        c: f64,
        model: LwrModel,
        normalization: Option<Normalization>,
    },
    Svm {
        c: f64,
        lambda: f64,
        theta: f64,
        scorer: CalibratedLinearModel,
        normalization: Option<Normalization>,
    },
    External {
        c: f64,
        theta: f64,
    },
}

impl ModelFile {
    pub fn method(&self) -> Method {
        match self {
            ModelFile::Lwr { .. } => Method::Lwr,
            ModelFile::Svm { .. } => Method::Svm,
            ModelFile::External { .. } => Method::External,
        }
    }

    pub fn c(&self) -> f64 {
        match self {
            ModelFile::Lwr { c, .. } | ModelFile::Svm { c, .. } | ModelFile::External { c, .. } => *c,
        }
    }

    pub fn file_name(&self) -> String {
        format!("model_{}_c{}.json", self.method().name(), self.c())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

pub fn curve_csv(rows: &[(Method, CurveRow)]) -> String {
    let mut out = format!("{CURVE_HEADER}\n");
    for (method, row) in rows {
        let accuracy = row.accuracy.map_or_else(|| UNDEFINED.to_string(), |a| a.to_string());
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            method.name(),
            row.c,
            row.rejection_rate,
            accuracy,
            row.risk_per_sample
        ));
    }
    out
}

/// Files to write once every computation has succeeded.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    pub fn write(self, dir: &Path) -> CliResult<()> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
        for (path, bytes) in self.files {
            write_atomic(&path, &bytes).map_err(|e| CliError::Data(e.to_string()))?;
        }
        Ok(())
    }
}

/// Reads every `model_*.json` in `dir`, sorted by file name.
pub fn read_models(dir: &Path) -> CliResult<Vec<ModelFile>> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::config(format!("--models {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("model_") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::config(format!("no model files in {}", dir.display())));
    }
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))
        })
        .collect()
}

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lwr::data::io::{features_csv, labels_csv};
use lwr::data::{
    chow_oracle, load_probabilities, split, synth_gaussian, DatasetFiles, GaussianMixtureSpec,
    SecondSpace, SplitSpec,
};
use lwr::Dataset;
use serde::Serialize;

use crate::args::{EvalArgs, SecondSpaceArg, SweepArgs, SynthArgs, TrainArgs};
use crate::error::{CliError, CliResult};
use crate::evaluate::{evaluate, Evaluated};
use crate::fit::{fit, Fitted};
use crate::output::{curve_csv, read_models, to_json, Outputs};
use crate::settings::{self, costs, fit_settings, optional_file, out_dir, parse_list, test_files, train_files};

pub const TRAIN_REPORT: &str = "train_report.json";
pub const EVAL_REPORT: &str = "eval_report.json";
pub const CURVE: &str = "curve.csv";
pub const ORACLE_SUMMARY: &str = "oracle_summary.json";

fn load(files: &DatasetFiles) -> CliResult<Dataset> {
    files
        .load()
        .map_err(|e| CliError::lib(format!("loading {}", files.labels.display()), e))
}

fn load_probs(path: &Option<PathBuf>) -> CliResult<Option<BTreeMap<String, f64>>> {
    path.as_deref()
        .map(|p| load_probabilities(p).map_err(|e| CliError::lib("loading probabilities", e)))
        .transpose()
}

fn split_pool(pool: &Dataset, fractions: Vec<f64>, seed: u64) -> CliResult<Vec<Dataset>> {
    let spec = SplitSpec::new(fractions, seed).map_err(|e| CliError::config(e.to_string()))?;
    split(pool, &spec).map_err(|e| CliError::lib("splitting the training pool", e))
}

fn add_fitted(outputs: &mut Outputs, dir: &Path, fitted: &Fitted) {
    for model in &fitted.models {
        outputs.add(dir.join(model.file_name()), to_json(model));
    }
    outputs.add(dir.join(TRAIN_REPORT), to_json(&fitted.summary));
}

fn add_evaluated(outputs: &mut Outputs, dir: &Path, evaluated: &Evaluated) {
    outputs.add(dir.join(EVAL_REPORT), to_json(&evaluated.reports));
    outputs.add(dir.join(CURVE), curve_csv(&evaluated.curve).into_bytes());
}

pub fn train(args: &TrainArgs) -> CliResult<()> {
    let dir = out_dir(&args.common)?;
    let (train_files, val_files) = train_files(&args.files)?;
    let settings = fit_settings(&args.fit, args.common.seed)?;

    let pool = load(&train_files)?;
    let (train_set, val) = match val_files {
        Some(v) => (pool, load(&v)?),
        None => {
            let mut parts = split_pool(&pool, vec![0.75, 0.25], settings.seed)?;
            let val = parts.pop().expect("two parts");
            (parts.pop().expect("two parts"), val)
        }
    };
    let probabilities = load_probs(&settings.probabilities)?;
    let fitted = fit(&train_set, &val, &settings, probabilities.as_ref())?;

    let mut outputs = Outputs::default();
    add_fitted(&mut outputs, &dir, &fitted);
    outputs.write(&dir)
}

pub fn eval(args: &EvalArgs) -> CliResult<()> {
    let dir = out_dir(&args.common)?;
    let models_dir = args
        .models
        .clone()
        .ok_or_else(|| CliError::config("missing --models"))?;
    let test = test_files(&args.test)?
        .ok_or_else(|| CliError::config("missing --test-labels, --test-phi, --test-phi-prime"))?;
    let probabilities = load_probs(&optional_file("probabilities", &args.probabilities)?)?;

    let models = read_models(&models_dir)?;
    let test = load(&test)?;
    let evaluated = evaluate(&models, &test, probabilities.as_ref())?;

    let mut outputs = Outputs::default();
    add_evaluated(&mut outputs, &dir, &evaluated);
    outputs.write(&dir)
}

/// Missing validation or test files are carved out of the training pool.
pub fn sweep(args: &SweepArgs) -> CliResult<()> {
    let dir = out_dir(&args.common)?;
    let (train_files, val_files) = train_files(&args.files)?;
    let test_files = settings::test_files(&args.test)?;
    let settings = fit_settings(&args.fit, args.common.seed)?;

    let pool = load(&train_files)?;
    let val = val_files.as_ref().map(load).transpose()?;
    let test = test_files.as_ref().map(load).transpose()?;
    let (train_set, val, test) = match (val, test) {
        (Some(v), Some(t)) => (pool, v, t),
        (Some(v), None) => {
            let mut parts = split_pool(&pool, vec![0.75, 0.25], settings.seed)?;
            let t = parts.pop().expect("two parts");
            (parts.pop().expect("two parts"), v, t)
        }
        (None, Some(t)) => {
            let mut parts = split_pool(&pool, vec![0.75, 0.25], settings.seed)?;
            let v = parts.pop().expect("two parts");
            (parts.pop().expect("two parts"), v, t)
        }
        (None, None) => {
            let mut parts = split_pool(&pool, vec![0.5, 0.25, 0.25], settings.seed)?;
            let t = parts.pop().expect("three parts");
            let v = parts.pop().expect("three parts");
            (parts.pop().expect("three parts"), v, t)
        }
    };
    let probabilities = load_probs(&settings.probabilities)?;
    let fitted = fit(&train_set, &val, &settings, probabilities.as_ref())?;
    let evaluated = evaluate(&fitted.models, &test, probabilities.as_ref())?;

    let mut outputs = Outputs::default();
    add_fitted(&mut outputs, &dir, &fitted);
    add_evaluated(&mut outputs, &dir, &evaluated);
    outputs.write(&dir)
}

#[derive(Debug, Serialize)]
struct OracleRow {
    c: f64,
    risk: f64,
    log_odds_margin: f64,
}

#[derive(Debug, Serialize)]
struct SynthSummary {
    m: usize,
    seed: u64,
    spec: GaussianMixtureSpec,
    second_space: SecondSpace,
    oracle: Vec<OracleRow>,
}

fn mixture_spec(args: &SynthArgs) -> CliResult<GaussianMixtureSpec> {
    if args.dim == 0 {
        return Err(CliError::config("--dim must be at least 1"));
    }
    let mu_plus = match &args.mu_plus {
        Some(t) => parse_list("mu-plus", t)?,
        None => {
            let mut v = vec![0.0; args.dim];
            v[0] = 1.0;
            v
        }
    };
    if mu_plus.len() != args.dim {
        return Err(CliError::config(format!(
            "--mu-plus has {} entries, --dim is {}",
            mu_plus.len(),
            args.dim
        )));
    }
    let mu_minus = match &args.mu_minus {
        Some(t) => parse_list("mu-minus", t)?,
        None => mu_plus.iter().map(|v| -v).collect(),
    };
    GaussianMixtureSpec::new(mu_plus, mu_minus, args.sigma, args.prior_plus)
        .map_err(|e| CliError::config(e.to_string()))
}

pub fn synth(args: &SynthArgs) -> CliResult<()> {
    let dir = out_dir(&args.common)?;
    let spec = mixture_spec(args)?;
    let costs = costs(args.c_list.as_deref())?;
    if args.m == 0 {
        return Err(CliError::config("--m must be at least 1"));
    }
    let second = match (args.second_space, args.projection_dims) {
        (SecondSpaceArg::Rotation, dims) => SecondSpace::RandomProjection {
            dims: dims.unwrap_or(args.dim),
        },
        (_, Some(_)) => return Err(CliError::config("--projection-dims needs --second-space rotation")),
        (SecondSpaceArg::Identity, None) => SecondSpace::Identity,
        (SecondSpaceArg::Squared, None) => SecondSpace::SquaredAppended,
    };
    if second == (SecondSpace::RandomProjection { dims: 0 }) {
        return Err(CliError::config("--projection-dims must be at least 1"));
    }

    let data = synth_gaussian(&spec, args.m, second, args.common.seed)
        .map_err(|e| CliError::lib("generating data", e))?;
    let oracle = costs
        .iter()
        .map(|&c| {
            let o = chow_oracle(&spec, c);
            OracleRow {
                c: c.value(),
                risk: o.risk,
                log_odds_margin: o.rule.log_odds_margin,
            }
        })
        .collect();
    let summary = SynthSummary {
        m: args.m,
        seed: args.common.seed,
        spec,
        second_space: second,
        oracle,
    };

    let files = DatasetFiles::in_dir(&dir, &args.prefix);
    let mut outputs = Outputs::default();
    outputs.add(files.labels, labels_csv(&data).into_bytes());
    outputs.add(files.phi, features_csv(data.phi()).into_bytes());
    outputs.add(files.phi_prime, features_csv(data.phi_prime()).into_bytes());
    outputs.add(dir.join(format!("{}{ORACLE_SUMMARY}", args.prefix)), to_json(&summary));
    outputs.write(&dir)
}

//! Grid training with validation-based selection, shared by `train` and `sweep`.

use std::collections::BTreeMap;

use lwr::baselines::{tune_threshold, train_svm, CalibratedLinearModel, ProbabilitySource};
use lwr::evaluation::risk_lwr;
use lwr::{train, Dataset, LwrHyperparams, RejectionCost};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{normalized, ModelFile, Normalization};
use crate::settings::FitSettings;

#[derive(Debug, Clone, Serialize)]
pub struct LwrCandidate {
    pub c: f64,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub objective: f64,
    pub iterations: usize,
    pub validation_risk: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SvmCandidate {
    pub lambda: f64,
    pub objective: f64,
    /// Why this candidate could not be calibrated, if it could not.
    pub error: Option<String>,
    pub cal_a: Option<f64>,
    pub cal_b: Option<f64>,
    /// Tuned threshold and validation risk per cost.
    pub thresholds: Vec<ThresholdRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRecord {
    pub c: f64,
    pub theta: f64,
    pub validation_risk: f64,
    pub rejected: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Selected {
    pub method: &'static str,
    pub c: f64,
    pub lambda: Option<f64>,
    pub lambda_prime: Option<f64>,
    pub theta: Option<f64>,
    pub validation_risk: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainSummary {
    pub settings: FitSettings,
    pub train_size: usize,
    pub validation_size: usize,
    pub single_class: bool,
    pub lwr_candidates: Vec<LwrCandidate>,
    pub svm_candidates: Vec<SvmCandidate>,
    pub external_thresholds: Vec<ThresholdRecord>,
    pub selected: Vec<Selected>,
}

pub struct Fitted {
    pub summary: TrainSummary,
    pub models: Vec<ModelFile>,
}

fn per_sample(risk: f64, n: usize) -> f64 {
    risk / n as f64
}

/// Index of the smallest value; the earliest wins ties.
fn argmin(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

pub fn fit(
    train_raw: &Dataset,
    val_raw: &Dataset,
    settings: &FitSettings,
    probabilities: Option<&BTreeMap<String, f64>>,
) -> CliResult<Fitted> {
    let normalization = settings.normalize.then(|| Normalization::fit(train_raw));
    let train_set = normalized(&normalization, train_raw)?;
    let val = normalized(&normalization, val_raw)?;

    let mut models = Vec::new();
    let mut selected = Vec::new();

    let mut lwr_candidates = Vec::new();
    for &c in &settings.costs {
        let start = lwr_candidates.len();
        let mut fitted = Vec::new();
        for &lambda in &settings.lambdas {
            for &lambda_prime in &settings.lambda_primes {
                let hyper = LwrHyperparams::new(c, lambda, lambda_prime)
                    .map_err(|e| CliError::config(e.to_string()))?;
                let context = format!("lwr c={} lambda={lambda} lambda'={lambda_prime}", c.value());
                let trained = train(&train_set, hyper, &settings.train_config)
                    .map_err(|e| CliError::lib(&context, e))?;
                let decisions = trained
                    .model
                    .decisions(&val)
                    .map_err(|e| CliError::lib(&context, e))?;
                let risk = risk_lwr(&decisions, val.labels(), c).map_err(|e| CliError::lib(&context, e))?;
                lwr_candidates.push(LwrCandidate {
                    c: c.value(),
                    lambda,
                    lambda_prime,
                    objective: trained.model.objective_value,
                    iterations: trained.report.iterations,
                    validation_risk: per_sample(risk, val.len()),
                });
                fitted.push(trained.model);
            }
        }
        let best = argmin(lwr_candidates[start..].iter().map(|r| r.validation_risk)).expect("non-empty grid");
        let record = &lwr_candidates[start + best];
        selected.push(Selected {
            method: "lwr",
            c: c.value(),
            lambda: Some(record.lambda),
            lambda_prime: Some(record.lambda_prime),
            theta: None,
            validation_risk: record.validation_risk,
        });
        models.push(ModelFile::Lwr {
            c: c.value(),
            model: fitted.swap_remove(best),
            normalization: normalization.clone(),
        });
    }

    let mut svm_candidates = Vec::new();
    if settings.baselines {
        let mut scorers = Vec::new();
        for &lambda in &settings.lambdas {
            let context = format!("svm lambda={lambda}");
            let linear = train_svm(&train_set, lambda, &settings.train_config)
                .map_err(|e| CliError::lib(&context, e))?;
            let mut record = SvmCandidate {
                lambda,
                objective: linear.objective_value,
                error: None,
                cal_a: None,
                cal_b: None,
                thresholds: Vec::new(),
            };
            match CalibratedLinearModel::fit(&linear, &val) {
                Ok(scorer) => {
                    record.cal_a = Some(scorer.cal_a);
                    record.cal_b = Some(scorer.cal_b);
                    let p = ProbabilitySource::Calibrated(scorer.clone())
                        .p_plus(&val)
                        .map_err(|e| CliError::lib(&context, e))?;
                    record.thresholds = thresholds(&p, &val, &settings.costs, &context)?;
                    scorers.push(Some(scorer));
                }
                Err(e) => {
                    record.error = Some(e.to_string());
                    scorers.push(None);
                }
            }
            svm_candidates.push(record);
        }
        for (k, &c) in settings.costs.iter().enumerate() {
            let risks = svm_candidates.iter().map(|r| {
                r.thresholds.get(k).map_or(f64::INFINITY, |t| t.validation_risk)
            });
            let best = argmin(risks).expect("non-empty grid");
            let (Some(scorer), Some(t)) = (&scorers[best], svm_candidates[best].thresholds.get(k)) else {
                return Err(CliError::Data(format!(
                    "svm baseline: calibration failed for every lambda ({})",
                    svm_candidates[best].error.as_deref().unwrap_or("unknown")
                )));
            };
            selected.push(Selected {
                method: "svm",
                c: c.value(),
                lambda: Some(svm_candidates[best].lambda),
                lambda_prime: None,
                theta: Some(t.theta),
                validation_risk: t.validation_risk,
            });
            models.push(ModelFile::Svm {
                c: c.value(),
                lambda: svm_candidates[best].lambda,
                theta: t.theta,
                scorer: scorer.clone(),
                normalization: normalization.clone(),
            });
        }
    }

    let mut external_thresholds = Vec::new();
    if let Some(table) = probabilities {
        let p = ProbabilitySource::Table(table.clone())
            .p_plus(&val)
            .map_err(|e| CliError::lib("external probabilities for validation ids", e))?;
        external_thresholds = thresholds(&p, &val, &settings.costs, "external")?;
        for t in &external_thresholds {
            selected.push(Selected {
                method: "external",
                c: t.c,
                lambda: None,
                lambda_prime: None,
                theta: Some(t.theta),
                validation_risk: t.validation_risk,
            });
            models.push(ModelFile::External { c: t.c, theta: t.theta });
        }
    }

    Ok(Fitted {
        summary: TrainSummary {
            settings: settings.clone(),
            train_size: train_set.len(),
            validation_size: val.len(),
            single_class: !train_set.has_both_labels(),
            lwr_candidates,
            svm_candidates,
            external_thresholds,
            selected,
        },
        models,
    })
}

fn thresholds(p: &[f64], val: &Dataset, costs: &[RejectionCost], context: &str) -> CliResult<Vec<ThresholdRecord>> {
    costs
        .iter()
        .map(|&c| {
            let tuned = tune_threshold(p, val.labels(), c).map_err(|e| CliError::lib(context, e))?;
            Ok(ThresholdRecord {
                c: c.value(),
                theta: tuned.theta,
                validation_risk: per_sample(tuned.risk, val.len()),
                rejected: tuned.rejected,
            })
        })
        .collect()
}

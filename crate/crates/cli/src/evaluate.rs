use std::collections::BTreeMap;

use lwr::baselines::{ProbabilitySource, ThresholdModel};
use lwr::evaluation::{tradeoff_curve, CurveRow, EvalReport};
use lwr::{Dataset, RejectionCost};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{normalized, Method, ModelFile};

#[derive(Debug, Clone, Serialize)]
pub struct MethodReport {
    pub method: Method,
    pub c: f64,
    pub report: EvalReport,
}

pub struct Evaluated {
    pub reports: Vec<MethodReport>,
    pub curve: Vec<(Method, CurveRow)>,
}

fn decisions(
    model: &ModelFile,
    test: &Dataset,
    probabilities: Option<&BTreeMap<String, f64>>,
) -> CliResult<Vec<lwr::Decision>> {
    let context = model.file_name();
    let lib = |e| CliError::lib(&context, e);
    match model {
        ModelFile::Lwr {
            model,
            normalization,
            ..
        } => model.decisions(&normalized(normalization, test)?).map_err(lib),
        ModelFile::Svm {
            theta,
            scorer,
            normalization,
            ..
        } => {
            let test = normalized(normalization, test)?;
            ThresholdModel::new(ProbabilitySource::Calibrated(scorer.clone()), *theta)
                .and_then(|m| m.decisions(&test))
                .map_err(lib)
        }
        ModelFile::External { theta, .. } => {
            let table = probabilities.ok_or_else(|| {
                CliError::config(format!("{context} needs --probabilities"))
            })?;
            ThresholdModel::new(ProbabilitySource::Table(table.clone()), *theta)
                .and_then(|m| m.decisions(test))
                .map_err(lib)
        }
    }
}

/// Scores every model on `test`. Curves are grouped by method and sorted by cost.
pub fn evaluate(
    models: &[ModelFile],
    test: &Dataset,
    probabilities: Option<&BTreeMap<String, f64>>,
) -> CliResult<Evaluated> {
    let mut by_method: BTreeMap<Method, Vec<EvalReport>> = BTreeMap::new();
    for model in models {
        let c = RejectionCost::new(model.c()).map_err(|e| CliError::Data(format!("{}: {e}", model.file_name())))?;
        let report = EvalReport::new(decisions(model, test, probabilities)?, test.labels(), c)
            .map_err(|e| CliError::lib(model.file_name(), e))?;
        by_method.entry(model.method()).or_default().push(report);
    }
    let mut reports = Vec::new();
    let mut curve = Vec::new();
    for (method, runs) in by_method {
        let rows = tradeoff_curve(&runs).map_err(|e| CliError::Data(format!("{}: {e}", method.name())))?;
        curve.extend(rows.into_iter().map(|r| (method, r)));
        let mut runs = runs;
        runs.sort_by(|a, b| a.c.value().total_cmp(&b.c.value()));
        reports.extend(runs.into_iter().map(|report| MethodReport {
            method,
            c: report.c.value(),
            report,
        }));
    }
    Ok(Evaluated { reports, curve })
}

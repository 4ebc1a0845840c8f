use serde::{Deserialize, Serialize};

use super::rademacher::{empirical_rademacher, RademacherEstimate};
use crate::domain::{Dataset, FeatureMatrix, LwrModel};
use crate::error::Result;
use crate::evaluation::risk_lwr;

pub const DEFAULT_DRAWS: usize = 1_000;

/// Train/test risk gap next to the Rademacher terms of the generalization
/// bound. Diagnostic only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub risk_train: f64,
    pub risk_test: f64,
    pub gap: f64,
    /// Classifier class, `B = |w|`, on the training features.
    pub rademacher_classifier: RademacherEstimate,
    /// Rejector class, `B = |u|`, on the training features.
    pub rademacher_rejector: RademacherEstimate,
    /// `risk_train + R(F) + (1 + c) R(G)`.
    pub bound_rhs: f64,
    /// Whether `risk_test <= bound_rhs` on this draw.
    pub bound_held: bool,
    pub note: String,
}

const NOTE: &str = "bound_rhs omits the confidence term; a violation on one draw does not contradict a high-probability bound";

fn estimate(features: &FeatureMatrix, bound: f64, draws: usize, seed: u64) -> Result<RademacherEstimate> {
    if bound == 0.0 {
        // The class is the zero function.
        return Ok(RademacherEstimate {
            mean: 0.0,
            std_error: 0.0,
            num_draws: draws,
            norm_bound: 0.0,
        });
    }
    empirical_rademacher(features, bound, draws, seed)
}

pub fn generalization_gap_report(model: &LwrModel, train: &Dataset, test: &Dataset) -> Result<GapReport> {
    generalization_gap_report_with(model, train, test, DEFAULT_DRAWS, 0)
}

pub fn generalization_gap_report_with(
    model: &LwrModel,
    train: &Dataset,
    test: &Dataset,
    num_draws: usize,
    seed: u64,
) -> Result<GapReport> {
    let c = model.hyper.c();
    let risk_train = risk_lwr(&model.decisions(train)?, train.labels(), c)? / train.len() as f64;
    let risk_test = risk_lwr(&model.decisions(test)?, test.labels(), c)? / test.len() as f64;
    let w_norm = model.w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u_norm = model.u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rademacher_classifier = estimate(train.phi(), w_norm, num_draws, seed)?;
    let rademacher_rejector = estimate(train.phi_prime(), u_norm, num_draws, seed.wrapping_add(1))?;
    let bound_rhs =
        risk_train + rademacher_classifier.mean + (1.0 + c.value()) * rademacher_rejector.mean;
    Ok(GapReport {
        risk_train,
        risk_test,
        gap: (risk_test - risk_train).abs(),
        rademacher_classifier,
        rademacher_rejector,
        bound_rhs,
        bound_held: risk_test <= bound_rhs,
        note: NOTE.to_string(),
    })
}

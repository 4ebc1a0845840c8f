//! Confidence-threshold rejection: accept class `+1` when `p(+1|x) > theta`,
//! class `-1` when `p(-1|x) > theta`, reject otherwise.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::calibration::CalibratedLinearModel;
use crate::domain::{Dataset, Decision, Label, RejectionCost};
use crate::error::{Error, Result};

pub fn threshold_decide(p_plus: f64, theta: f64) -> Decision {
    if p_plus > theta {
        Decision::AcceptPositive
    } else if 1.0 - p_plus > theta {
        Decision::AcceptNegative
    } else {
        Decision::Reject
    }
}

/// Where per-sample `p(+1|x)` comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProbabilitySource {
    Calibrated(CalibratedLinearModel),
    /// Probabilities keyed by sample id, produced by an external classifier.
    Table(BTreeMap<String, f64>),
}

impl ProbabilitySource {
    pub fn p_plus(&self, data: &Dataset) -> Result<Vec<f64>> {
        match self {
            ProbabilitySource::Calibrated(model) => {
                if model.w.len() != data.phi().dims() {
                    return Err(Error::DimensionMismatch {
                        expected: model.w.len(),
                        found: data.phi().dims(),
                    });
                }
                Ok(data.phi().iter_rows().map(|row| model.p_plus(row)).collect())
            }
            ProbabilitySource::Table(table) => data
                .ids()
                .iter()
                .map(|id| table.get(id).copied().ok_or_else(|| Error::MissingId(id.clone())))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdModel {
    pub scorer: ProbabilitySource,
    theta: f64,
}

impl ThresholdModel {
    pub fn new(scorer: ProbabilitySource, theta: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&theta) {
            return Err(Error::param(format!("theta must lie in [1/2, 1], got {theta}")));
        }
        Ok(ThresholdModel { scorer, theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn decisions(&self, data: &Dataset) -> Result<Vec<Decision>> {
        Ok(self
            .scorer
            .p_plus(data)?
            .into_iter()
            .map(|p| threshold_decide(p, self.theta))
            .collect())
    }
}

/// Summed risk of thresholding `p_plus` at `theta`.
pub fn threshold_risk(p_plus: &[f64], labels: &[Label], theta: f64, c: RejectionCost) -> f64 {
    p_plus
        .iter()
        .zip(labels)
        .map(|(&p, &y)| crate::evaluation::pointwise_loss(threshold_decide(p, theta), y, c))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunedThreshold {
    pub theta: f64,
    pub risk: f64,
    pub rejected: usize,
}

/// Minimizes validation risk over `theta` in `[1/2, 1]`.
///
/// Risk is constant between consecutive distinct confidences
/// `max(p, 1 - p)`, so scanning `1/2`, the midpoints between sorted distinct
/// confidences, and `1` is exhaustive. Ties go to the smallest `theta`.
pub fn tune_threshold(p_plus: &[f64], labels: &[Label], c: RejectionCost) -> Result<TunedThreshold> {
    if p_plus.is_empty() {
        return Err(Error::Empty("validation set is empty".into()));
    }
    if p_plus.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: p_plus.len(),
            right: labels.len(),
        });
    }
    if let Some(p) = p_plus.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::param(format!("probability {p} outside [0, 1]")));
    }

    // (confidence, wrong-if-accepted), ascending by confidence.
    let mut samples: Vec<(f64, bool)> = p_plus
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let pred = if p > 0.5 { Label::Positive } else { Label::Negative };
            (p.max(1.0 - p), pred != y)
        })
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));

    let cv = c.value();
    let total_wrong = samples.iter().filter(|s| s.1).count();
    let risk_at = |rejected: usize, wrong_rejected: usize| {
        (total_wrong - wrong_rejected) as f64 + cv * rejected as f64
    };

    // theta = 1/2 rejects the samples with confidence exactly 1/2.
    let mut k = 0;
    let mut wrong_rejected = 0;
    while k < samples.len() && samples[k].0 <= 0.5 {
        wrong_rejected += samples[k].1 as usize;
        k += 1;
    }
    let mut best = TunedThreshold {
        theta: 0.5,
        risk: risk_at(k, wrong_rejected),
        rejected: k,
    };

    while k < samples.len() {
        let level = samples[k].0;
        while k < samples.len() && samples[k].0 == level {
            wrong_rejected += samples[k].1 as usize;
            k += 1;
        }
        let theta = if k < samples.len() {
            let next = samples[k].0;
            let mid = level + 0.5 * (next - level);
            if mid > level && mid < next {
                mid
            } else {
                level
            }
        } else {
            1.0
        };
        let risk = risk_at(k, wrong_rejected);
        if risk < best.risk {
            best = TunedThreshold {
                theta,
                risk,
                rejected: k,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Negative as N, Positive as P};

    fn cost(c: f64) -> RejectionCost {
        RejectionCost::new(c).unwrap()
    }

    #[test]
    fn decide_examples() {
        assert_eq!(threshold_decide(0.9, 0.8), Decision::AcceptPositive);
        assert_eq!(threshold_decide(0.5, 0.5), Decision::Reject);
        assert_eq!(threshold_decide(0.1, 0.8), Decision::AcceptNegative);
        assert_eq!(threshold_decide(0.8, 0.8), Decision::Reject);
        assert_eq!(threshold_decide(1.0, 1.0), Decision::Reject);
    }

    #[test]
    fn confident_and_correct_needs_no_rejection() {
        let p = [0.95, 0.05, 0.9, 0.02];
        let y = [P, N, P, N];
        let t = tune_threshold(&p, &y, cost(0.3)).unwrap();
        assert_eq!(t.theta, 0.5);
        assert_eq!(t.risk, 0.0);
        assert_eq!(t.rejected, 0);
    }

    #[test]
    fn certain_mistakes_reject_everything() {
        let p = [1.0, 0.0, 1.0];
        let y = [N, P, N];
        let t = tune_threshold(&p, &y, cost(0.2)).unwrap();
        assert_eq!(t.theta, 1.0);
        assert!((t.risk - 0.2 * 3.0).abs() < 1e-12);
        assert_eq!(t.rejected, 3);
    }

    #[test]
    fn three_sample_example_against_dense_grid() {
        let p = [0.9, 0.6, 0.55];
        let y = [P, N, P];
        let c = cost(0.2);
        let t = tune_threshold(&p, &y, c).unwrap();
        let grid_min = (0..10_000)
            .map(|k| 0.5 + 0.5 * k as f64 / 9_999.0)
            .map(|theta| threshold_risk(&p, &y, theta, c))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(t.risk, grid_min);
        assert_eq!(threshold_risk(&p, &y, t.theta, c), t.risk);
        // Rejecting both low-confidence samples (cost 0.4) beats one certain
        // mistake (cost 1).
        assert_eq!(t.rejected, 2);
        assert!((t.risk - 0.4).abs() < 1e-12);
    }

    #[test]
    fn theta_range_enforced() {
        let table = ProbabilitySource::Table(BTreeMap::new());
        assert!(ThresholdModel::new(table.clone(), 0.49).is_err());
        assert!(ThresholdModel::new(table.clone(), 1.01).is_err());
        assert!(ThresholdModel::new(table, 0.75).is_ok());
    }

    #[test]
    fn tuning_validates_input() {
        assert!(tune_threshold(&[], &[], cost(0.1)).is_err());
        assert!(tune_threshold(&[1.5], &[P], cost(0.1)).is_err());
        assert!(tune_threshold(&[0.5], &[P, N], cost(0.1)).is_err());
    }
}

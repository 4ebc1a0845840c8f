//! Sigmoid calibration of scores: `p(+1 | s) = 1 / (1 + exp(-(a s + b)))`,
//! fit by maximum likelihood.

use serde::{Deserialize, Serialize};

use super::svm::LinearModel;
use crate::domain::{Dataset, Label};
use crate::error::{Error, Result};

/// Bound on `|a|`; separable inputs would otherwise send it to infinity.
pub const SLOPE_CAP: f64 = 1e4;

const MAX_ITER: usize = 500;
const GRAD_TOL: f64 = 1e-10;

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn nll(scores: &[f64], targets: &[f64], a: f64, b: f64) -> f64 {
    scores
        .iter()
        .zip(targets)
        .map(|(s, t)| {
            let z = a * s + b;
            softplus(z) - t * z
        })
        .sum()
}

/// Every negative scores strictly below every positive.
fn separable(scores: &[f64], labels: &[Label]) -> bool {
    let mut max_neg = f64::NEG_INFINITY;
    let mut min_pos = f64::INFINITY;
    for (s, l) in scores.iter().zip(labels) {
        match l {
            Label::Positive => min_pos = min_pos.min(*s),
            Label::Negative => max_neg = max_neg.max(*s),
        }
    }
    max_neg < min_pos
}

/// Maximum-likelihood offset for a fixed slope, by safeguarded Newton.
fn fit_offset(scores: &[f64], targets: &[f64], a: f64, mut b: f64) -> f64 {
    let mut f = nll(scores, targets, a, b);
    for _ in 0..MAX_ITER {
        let (mut g, mut h) = (0.0, 0.0);
        for (s, t) in scores.iter().zip(targets) {
            let p = sigmoid(a * s + b);
            g += p - t;
            h += p * (1.0 - p);
        }
        if g.abs() < GRAD_TOL {
            break;
        }
        let db = -g / (h + 1e-12);
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-12 {
            let nb = b + step * db;
            let nf = nll(scores, targets, a, nb);
            if nf < f {
                b = nb;
                f = nf;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    b
}

/// Returns `(a, b)`. Fails on single-class or non-finite input, and when the
/// likelihood prefers a negative slope.
pub fn fit_calibration(scores: &[f64], labels: &[Label]) -> Result<(f64, f64)> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::param("calibration scores must be finite"));
    }
    let positives = labels.iter().filter(|&&l| l == Label::Positive).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::SingleClass("calibration needs both labels".into()));
    }
    let targets: Vec<f64> = labels
        .iter()
        .map(|l| if *l == Label::Positive { 1.0 } else { 0.0 })
        .collect();

    let prior_b = (positives as f64 / (labels.len() - positives) as f64).ln();
    if separable(scores, labels) {
        // The likelihood keeps improving as the slope grows, so the
        // supremum is approached at the cap.
        return Ok((SLOPE_CAP, fit_offset(scores, &targets, SLOPE_CAP, prior_b)));
    }

    let mut a = 0.0;
    let mut b = prior_b;
    let mut f = nll(scores, &targets, a, b);

    for _ in 0..MAX_ITER {
        let (mut ga, mut gb, mut haa, mut hab, mut hbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (s, t) in scores.iter().zip(&targets) {
            let p = sigmoid(a * s + b);
            let r = p - t;
            let w = p * (1.0 - p);
            ga += r * s;
            gb += r;
            haa += w * s * s;
            hab += w * s;
            hbb += w;
        }
        let pinned = (a >= SLOPE_CAP && ga < 0.0) || (a <= -SLOPE_CAP && ga > 0.0);
        let proj_ga = if pinned { 0.0 } else { ga };
        if proj_ga.abs().max(gb.abs()) < GRAD_TOL {
            break;
        }

        let (da, db) = if pinned {
            (0.0, -gb / (hbb + 1e-12))
        } else {
            // Levenberg damping keeps the step defined when the Hessian is
            // singular (e.g. all scores equal).
            let damp = 1e-12 * (1.0 + haa + hbb);
            let (h11, h22) = (haa + damp, hbb + damp);
            let det = h11 * h22 - hab * hab;
            (-(h22 * ga - hab * gb) / det, -(h11 * gb - hab * ga) / det)
        };

        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-12 {
            let na = (a + step * da).clamp(-SLOPE_CAP, SLOPE_CAP);
            let nb = b + step * db;
            let nf = nll(scores, &targets, na, nb);
            if nf < f {
                a = na;
                b = nb;
                f = nf;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }

    if a < 0.0 {
        return Err(Error::Orientation(a));
    }
    Ok((a, b))
}

/// Linear scorer followed by a sigmoid calibration map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedLinearModel {
    pub w: Vec<f64>,
    pub b: f64,
    pub cal_a: f64,
    pub cal_b: f64,
}

impl CalibratedLinearModel {
    /// Calibrates `linear` on its scores over `data`.
    pub fn fit(linear: &LinearModel, data: &Dataset) -> Result<Self> {
        let scores = linear.scores(data)?;
        let (cal_a, cal_b) = fit_calibration(&scores, data.labels())?;
        Ok(CalibratedLinearModel {
            w: linear.w.clone(),
            b: linear.b,
            cal_a,
            cal_b,
        })
    }

    pub fn p_plus(&self, phi_row: &[f64]) -> f64 {
        let s = crate::domain::dot(&self.w, phi_row) + self.b;
        sigmoid(self.cal_a * s + self.cal_b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Negative as N, Positive as P};

    #[test]
    fn separable_scores_hit_the_cap() {
        let mut scores = vec![];
        let mut labels = vec![];
        for _ in 0..20 {
            scores.extend([-5.0, 5.0]);
            labels.extend([N, P]);
        }
        let (a, b) = fit_calibration(&scores, &labels).unwrap();
        assert!(a > 0.0);
        assert!((a - SLOPE_CAP).abs() < 1e-9 * SLOPE_CAP, "{a}");
        for (s, y) in scores.iter().zip(&labels) {
            let p = sigmoid(a * s + b);
            let target = if *y == P { 1.0 } else { 0.0 };
            assert!((p - target).abs() < 1e-3);
        }
    }

    #[test]
    fn equal_scores_give_one_half() {
        let scores = vec![0.7; 10];
        let labels: Vec<Label> = (0..10).map(|i| if i % 2 == 0 { P } else { N }).collect();
        let (a, b) = fit_calibration(&scores, &labels).unwrap();
        assert!(b.abs() < 1e-9);
        assert!((sigmoid(a * 0.7 + b) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn negating_scores_and_labels_mirrors_probabilities() {
        let scores = [-2.0, -1.0, -0.3, 0.1, 0.4, 1.2, 2.5, 0.0, -0.7];
        let labels = [N, N, P, N, P, P, P, N, P];
        let (a, b) = fit_calibration(&scores, &labels).unwrap();
        let neg_scores: Vec<f64> = scores.iter().map(|s| -s).collect();
        let flipped: Vec<Label> = labels.iter().map(|l| l.flipped()).collect();
        let (a2, b2) = fit_calibration(&neg_scores, &flipped).unwrap();
        assert!((a - a2).abs() < 1e-8);
        for (s, ns) in scores.iter().zip(&neg_scores) {
            let p = sigmoid(a * s + b);
            let q = sigmoid(a2 * ns + b2);
            assert!((p - (1.0 - q)).abs() < 1e-9);
        }
    }

    #[test]
    fn reversed_orientation_is_an_error() {
        let scores = [-2.0, -1.0, 1.0, 2.0];
        let labels = [P, P, N, N];
        assert!(matches!(fit_calibration(&scores, &labels), Err(Error::Orientation(_))));
    }

    #[test]
    fn input_validation() {
        assert!(matches!(fit_calibration(&[1.0, 2.0], &[P, P]), Err(Error::SingleClass(_))));
        assert!(fit_calibration(&[1.0, f64::NAN], &[P, N]).is_err());
        assert!(fit_calibration(&[1.0], &[P, N]).is_err());
    }

    #[test]
    fn matches_grid_maximum() {
        let scores = [-1.5, -0.2, 0.3, 0.9, -0.8, 1.7, 0.05, -0.4];
        let labels = [N, N, P, P, P, P, N, N];
        let (a, b) = fit_calibration(&scores, &labels).unwrap();
        let targets: Vec<f64> = labels.iter().map(|l| if *l == P { 1.0 } else { 0.0 }).collect();
        let best = nll(&scores, &targets, a, b);
        for i in -20..=20 {
            for j in -20..=20 {
                let (da, db) = (i as f64 * 0.05, j as f64 * 0.05);
                assert!(nll(&scores, &targets, a + da, b + db) >= best - 1e-12);
            }
        }
    }
}

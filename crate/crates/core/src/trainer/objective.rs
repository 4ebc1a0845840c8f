//! Surrogate loss, the regularized primal objective, its subgradient and the
//! slack variables implied by a model.

use crate::domain::{Dataset, Label, LwrHyperparams, LwrModel};
use crate::error::Result;

/// Which term of the three-way max is active for a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveTerm {
    Classification,
    Rejection,
    Zero,
}

fn terms(f_val: f64, r_val: f64, y: Label, hyper: &LwrHyperparams) -> (f64, f64) {
    let c = hyper.c().value();
    let classification = 1.0 + 0.5 * hyper.alpha() * (r_val - y.sign() * f_val);
    let rejection = c * (1.0 - hyper.beta() * r_val);
    (classification, rejection)
}

/// Picks the active term; ties go to classification, then rejection, then zero.
fn active(classification: f64, rejection: f64) -> ActiveTerm {
    if classification >= rejection && classification >= 0.0 {
        ActiveTerm::Classification
    } else if rejection >= 0.0 {
        ActiveTerm::Rejection
    } else {
        ActiveTerm::Zero
    }
}

/// `max(1 + (alpha/2)(r - y f), c (1 - beta r), 0)`.
pub fn surrogate_loss(f_val: f64, r_val: f64, y: Label, hyper: &LwrHyperparams) -> f64 {
    let (classification, rejection) = terms(f_val, r_val, y, hyper);
    classification.max(rejection).max(0.0)
}

pub fn active_term(f_val: f64, r_val: f64, y: Label, hyper: &LwrHyperparams) -> ActiveTerm {
    let (classification, rejection) = terms(f_val, r_val, y, hyper);
    active(classification, rejection)
}

/// `(lambda/2)|w|^2 + (lambda'/2)|u|^2`.
pub fn regularization(model: &LwrModel) -> f64 {
    let h = &model.hyper;
    let w2: f64 = model.w.iter().map(|v| v * v).sum();
    let u2: f64 = model.u.iter().map(|v| v * v).sum();
    0.5 * h.lambda() * w2 + 0.5 * h.lambda_prime() * u2
}

/// Regularization plus the summed surrogate loss; equals the constrained
/// form's objective with every slack at its smallest feasible value.
pub fn primal_objective(model: &LwrModel, data: &Dataset) -> Result<f64> {
    model.check_dims(data)?;
    let loss: f64 = (0..data.len())
        .map(|i| {
            let (f, r) = model.scores(data, i);
            surrogate_loss(f, r, data.labels()[i], &model.hyper)
        })
        .sum();
    Ok(regularization(model) + loss)
}

/// Per-sample slack values `xi_i` at the model's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackVector(pub Vec<f64>);

impl SlackVector {
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

pub fn recover_slacks(model: &LwrModel, data: &Dataset) -> Result<SlackVector> {
    model.check_dims(data)?;
    Ok(SlackVector(
        (0..data.len())
            .map(|i| {
                let (f, r) = model.scores(data, i);
                surrogate_loss(f, r, data.labels()[i], &model.hyper)
            })
            .collect(),
    ))
}

/// A subgradient of [`primal_objective`], split by parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgradient {
    pub dw: Vec<f64>,
    pub db: f64,
    pub du: Vec<f64>,
    pub db_prime: f64,
}

impl Subgradient {
    /// Same layout as [`LwrModel::params`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.dw.len() + self.du.len() + 2);
        g.extend_from_slice(&self.dw);
        g.push(self.db);
        g.extend_from_slice(&self.du);
        g.push(self.db_prime);
        g
    }

    pub fn norm(&self) -> f64 {
        self.flatten().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Gradient of the active term per sample plus the regularization gradient.
/// At ties the classification term wins over the rejection term, which wins
/// over zero.
pub fn subgradient(model: &LwrModel, data: &Dataset) -> Result<Subgradient> {
    model.check_dims(data)?;
    let h = &model.hyper;
    let half_alpha = 0.5 * h.alpha();
    let c_beta = h.c().value() * h.beta();
    let mut g = Subgradient {
        dw: model.w.iter().map(|w| h.lambda() * w).collect(),
        db: 0.0,
        du: model.u.iter().map(|u| h.lambda_prime() * u).collect(),
        db_prime: 0.0,
    };
    for i in 0..data.len() {
        let (f, r) = model.scores(data, i);
        let y = data.labels()[i];
        match active_term(f, r, y, h) {
            ActiveTerm::Classification => {
                let ys = y.sign();
                for (dw, x) in g.dw.iter_mut().zip(data.phi().row(i)) {
                    *dw -= half_alpha * ys * x;
                }
                g.db -= half_alpha * ys;
                for (du, x) in g.du.iter_mut().zip(data.phi_prime().row(i)) {
                    *du += half_alpha * x;
                }
                g.db_prime += half_alpha;
            }
            ActiveTerm::Rejection => {
                for (du, x) in g.du.iter_mut().zip(data.phi_prime().row(i)) {
                    *du -= c_beta * x;
                }
                g.db_prime -= c_beta;
            }
            ActiveTerm::Zero => {}
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{FeatureMatrix, RejectionCost};

    fn hyper(c: f64, lambda: f64, lambda_prime: f64) -> LwrHyperparams {
        LwrHyperparams::new(RejectionCost::new(c).unwrap(), lambda, lambda_prime).unwrap()
    }

    fn one_sample(phi: &[f64], phi_prime: &[f64], y: Label) -> Dataset {
        let ids = vec!["s0".to_string()];
        Dataset::new(
            vec![y],
            FeatureMatrix::new(ids.clone(), phi.len(), phi.to_vec()).unwrap(),
            FeatureMatrix::new(ids, phi_prime.len(), phi_prime.to_vec()).unwrap(),
        )
        .unwrap()
    }

    // Each term evaluated on its own, then maxed.
    fn scalar_oracle(f: f64, r: f64, y: f64, c: f64) -> f64 {
        let beta = 1.0 / (1.0 - 2.0 * c);
        let t1 = 1.0 + 0.5 * (r - y * f);
        let t2 = c * (1.0 - beta * r);
        [t1, t2, 0.0].into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn surrogate_examples() {
        let h = hyper(0.25, 1.0, 1.0);
        assert_eq!(surrogate_loss(2.0, 0.0, Label::Positive, &h), 0.25);
        assert_eq!(scalar_oracle(2.0, 0.0, 1.0, 0.25), 0.25);
        assert_eq!(surrogate_loss(3.0, 1.0, Label::Positive, &h), 0.0);
        assert_eq!(surrogate_loss(0.0, 0.0, Label::Negative, &h), 1.0);
        assert_eq!(scalar_oracle(0.0, 0.0, -1.0, 0.25), 1.0);
    }

    #[test]
    fn objective_at_zero_is_sample_count() {
        let h = hyper(0.25, 1.0, 1.0);
        let ids: Vec<String> = (0..5).map(|i| format!("s{i}")).collect();
        let data = Dataset::new(
            vec![Label::Positive, Label::Negative, Label::Positive, Label::Negative, Label::Negative],
            FeatureMatrix::new(ids.clone(), 2, (0..10).map(f64::from).collect()).unwrap(),
            FeatureMatrix::new(ids, 1, vec![0.3, -1.0, 2.0, 0.0, 7.0]).unwrap(),
        )
        .unwrap();
        let model = LwrModel::zeros(2, 1, h);
        assert_eq!(primal_objective(&model, &data).unwrap(), 5.0);
        assert!(recover_slacks(&model, &data).unwrap().0.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn objective_single_sample_examples() {
        // f = 3, r = 1 with |w|^2 = |u|^2 = 1.
        let h = hyper(0.25, 1.0, 1.0);
        let data = one_sample(&[1.0], &[1.0], Label::Positive);
        let mut model = LwrModel::zeros(1, 1, h);
        model.set_params(&[1.0, 2.0, 1.0, 0.0]);
        assert_eq!(primal_objective(&model, &data).unwrap(), 1.0);

        // f = 0, r = -10 at c = 0.4.
        let h = hyper(0.4, 1.0, 1.0);
        let mut model = LwrModel::zeros(1, 1, h);
        model.set_params(&[1.0, -1.0, 2.0, -12.0]);
        let reg = 0.5 + 2.0;
        let expected = reg + scalar_oracle(0.0, -10.0, 1.0, 0.4);
        assert!((scalar_oracle(0.0, -10.0, 1.0, 0.4) - 20.4).abs() < 1e-12);
        assert!((primal_objective(&model, &data).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn slack_with_zero_rejector_score() {
        let h = hyper(0.3, 1.0, 1.0);
        let data = one_sample(&[2.0], &[1.0], Label::Negative);
        let mut model = LwrModel::zeros(1, 1, h);
        model.set_params(&[0.25, 0.1, 0.0, 0.0]);
        let f = 0.25 * 2.0 + 0.1;
        let xi = recover_slacks(&model, &data).unwrap().0[0];
        let expected = 0.3f64.max(1.0 - 0.5 * -f).max(0.0);
        assert_eq!(xi, expected);
    }

    #[test]
    fn subgradient_in_flat_region_is_regularization() {
        let h = hyper(0.25, 1.0, 1.0);
        let data = one_sample(&[1.0, -2.0], &[0.5], Label::Positive);
        let mut model = LwrModel::zeros(2, 1, h);
        // f = 3 + 1 = 4, r = 1: both terms negative.
        model.set_params(&[1.0, -1.0, 1.0, 2.0, 0.0]);
        assert_eq!(active_term(4.0, 1.0, Label::Positive, &h), ActiveTerm::Zero);
        let g = subgradient(&model, &data).unwrap();
        assert_eq!(g.dw, vec![1.0, -1.0]);
        assert_eq!(g.db, 0.0);
        assert_eq!(g.du, vec![2.0]);
        assert_eq!(g.db_prime, 0.0);
    }

    #[test]
    fn subgradient_rejection_branch() {
        let c = 0.2;
        let h = hyper(c, 0.7, 1.3);
        let beta = 1.0 / (1.0 - 2.0 * c);
        let data = one_sample(&[1.0], &[2.0, -1.0], Label::Positive);
        let mut model = LwrModel::zeros(1, 2, h);
        // f = 10, r = -2: rejection term 0.2 * (1 + 2 beta) dominates.
        model.set_params(&[3.0, 7.0, -0.5, 1.0, -0.0]);
        let (f, r) = model.scores(&data, 0);
        assert_eq!(active_term(f, r, Label::Positive, &h), ActiveTerm::Rejection);
        let g = subgradient(&model, &data).unwrap();
        assert_eq!(g.dw, vec![0.7 * 3.0]);
        assert_eq!(g.db, 0.0);
        assert!((g.du[0] - (1.3 * -0.5 - c * beta * 2.0)).abs() < 1e-12);
        assert!((g.du[1] - (1.3 * 1.0 + c * beta)).abs() < 1e-12);
        assert!((g.db_prime + c * beta).abs() < 1e-12);
    }

    #[test]
    fn tie_prefers_classification() {
        let h = hyper(0.25, 1.0, 1.0);
        // classification 1 + 0.5 (0 - 1.5) = 0.25 = rejection 0.25 (1 - 0).
        assert_eq!(active_term(1.5, 0.0, Label::Positive, &h), ActiveTerm::Classification);
        // All three terms are zero at f = 2.5, r = 1/beta.
        assert_eq!(surrogate_loss(2.5, 0.5, Label::Positive, &h), 0.0);
        assert_eq!(active_term(2.5, 0.5, Label::Positive, &h), ActiveTerm::Classification);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let h = hyper(0.25, 1.0, 1.0);
        let data = one_sample(&[1.0], &[1.0], Label::Positive);
        let model = LwrModel::zeros(2, 1, h);
        assert!(primal_objective(&model, &data).is_err());
        assert!(subgradient(&model, &data).is_err());
        assert!(recover_slacks(&model, &data).is_err());
    }
}

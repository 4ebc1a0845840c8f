//! Training of the joint classifier/rejector.

pub(crate) mod descent;
mod objective;
pub(crate) mod qp;

use serde::{Deserialize, Serialize};

pub use objective::{
    active_term, primal_objective, recover_slacks, regularization, subgradient, surrogate_loss,
    ActiveTerm, SlackVector, Subgradient,
};

use crate::domain::{Dataset, LwrHyperparams, LwrModel};
use crate::error::{Error, Result};
use qp::PiecewiseQp;

/// Diminishing step rule for the subgradient solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepSchedule {
    /// `initial / sqrt(k + 1)`.
    InvSqrt { initial: f64 },
    /// `initial / (k + 1)`.
    Harmonic { initial: f64 },
}

impl StepSchedule {
    pub fn step(&self, k: usize) -> f64 {
        match *self {
            StepSchedule::InvSqrt { initial } => initial / ((k + 1) as f64).sqrt(),
            StepSchedule::Harmonic { initial } => initial / (k + 1) as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solver {
    /// Primal-dual interior point on the slack form; converges to high accuracy.
    InteriorPoint,
    /// Subgradient descent on the slack-free form with best-iterate tracking.
    Subgradient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub solver: Solver,
    pub max_iterations: usize,
    /// Interior point: bound on the complementarity gap and residuals,
    /// relative to the starting objective. Subgradient: relative improvement
    /// over the stopping window, and subgradient-norm threshold.
    pub tolerance: f64,
    pub step_schedule: StepSchedule,
    /// Recorded for reproducibility. Both solvers start from zero.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            solver: Solver::InteriorPoint,
            max_iterations: 500,
            tolerance: 1e-9,
            step_schedule: StepSchedule::InvSqrt { initial: 1.0 },
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn subgradient() -> Self {
        TrainConfig {
            solver: Solver::Subgradient,
            max_iterations: 200_000,
            tolerance: 1e-6,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations must be at least 1"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::param("tolerance must be positive"));
        }
        let initial = match self.step_schedule {
            StepSchedule::InvSqrt { initial } | StepSchedule::Harmonic { initial } => initial,
        };
        if !(initial.is_finite() && initial > 0.0) {
            return Err(Error::param("initial step must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub solver: Solver,
    pub iterations: usize,
    /// Only one label present in the training data.
    pub single_class: bool,
    /// Best objective after each iteration (non-increasing).
    pub objective_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub model: LwrModel,
    pub report: TrainReport,
}

struct LwrObjective<'a> {
    data: &'a Dataset,
    template: LwrModel,
}

impl LwrObjective<'_> {
    fn at(&self, x: &[f64]) -> LwrModel {
        let mut model = self.template.clone();
        model.set_params(x);
        model
    }
}

impl descent::Subdifferentiable for LwrObjective<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        primal_objective(&self.at(x), self.data).expect("dimensions checked")
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        subgradient(&self.at(x), self.data)
            .expect("dimensions checked")
            .flatten()
    }
}

/// Layout of the flat parameter vector `(w, b, u, b')`.
pub(crate) fn lwr_problem(data: &Dataset, hyper: &LwrHyperparams) -> PiecewiseQp {
    let d = data.phi().dims();
    let dp = data.phi_prime().dims();
    let n = d + dp + 2;
    let mut diag = vec![0.0; n];
    diag[..d].fill(hyper.lambda());
    diag[d + 1..d + 1 + dp].fill(hyper.lambda_prime());
    let mut qp = PiecewiseQp::new(diag);

    let half_alpha = 0.5 * hyper.alpha();
    let c = hyper.c().value();
    let c_beta = c * hyper.beta();
    let zero = vec![0.0; n];
    let mut classification = vec![0.0; n];
    let mut rejection = vec![0.0; n];
    for i in 0..data.len() {
        let ys = data.labels()[i].sign();
        let phi = data.phi().row(i);
        let phi_prime = data.phi_prime().row(i);
        for k in 0..d {
            classification[k] = -half_alpha * ys * phi[k];
        }
        classification[d] = -half_alpha * ys;
        for k in 0..dp {
            classification[d + 1 + k] = half_alpha * phi_prime[k];
            rejection[d + 1 + k] = -c_beta * phi_prime[k];
        }
        classification[n - 1] = half_alpha;
        rejection[n - 1] = -c_beta;
        qp.push_sample([
            (classification.as_slice(), 1.0),
            (rejection.as_slice(), c),
            (zero.as_slice(), 0.0),
        ]);
    }
    qp
}

/// Minimizes the regularized surrogate objective over `(w, b, u, b')`.
///
/// The result is deterministic for identical inputs. Data containing a
/// single label is trained anyway and flagged in the report. When the
/// iteration budget runs out, [`Error::NotConverged`] carries the best
/// iterate found.
pub fn train(data: &Dataset, hyper: LwrHyperparams, cfg: &TrainConfig) -> Result<Trained> {
    cfg.validate()?;
    let single_class = !data.has_both_labels();
    let mut model = LwrModel::zeros(data.phi().dims(), data.phi_prime().dims(), hyper);

    let (iterations, history, converged) = match cfg.solver {
        Solver::InteriorPoint => {
            let qp = lwr_problem(data, &hyper);
            let out = qp.solve(cfg.tolerance, cfg.max_iterations);
            model.set_params(&out.x);
            (out.iterations, out.history, out.converged)
        }
        Solver::Subgradient => {
            model.check_dims(data)?;
            let objective = LwrObjective {
                data,
                template: model.clone(),
            };
            let out = descent::minimize(&objective, model.params(), cfg);
            model.set_params(&out.x);
            (out.iterations, out.history, out.converged)
        }
    };
    model.objective_value = primal_objective(&model, data)?;

    if !converged {
        return Err(Error::NotConverged {
            iterations,
            objective: model.objective_value,
            best: Box::new(model),
        });
    }
    Ok(Trained {
        model,
        report: TrainReport {
            solver: cfg.solver,
            iterations,
            single_class,
            objective_history: history,
        },
    })
}

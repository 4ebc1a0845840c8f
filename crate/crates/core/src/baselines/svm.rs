use serde::{Deserialize, Serialize};

use crate::domain::{dot, Dataset};
use crate::error::{Error, Result};
use crate::trainer::descent::{self, Subdifferentiable};
use crate::trainer::qp::PiecewiseQp;
use crate::trainer::{Solver, TrainConfig};

/// Linear scorer `w.phi + b` trained with the hinge loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b: f64,
    pub lambda: f64,
    pub objective_value: f64,
}

impl LinearModel {
    pub fn score(&self, phi_row: &[f64]) -> f64 {
        dot(&self.w, phi_row) + self.b
    }

    pub fn scores(&self, data: &Dataset) -> Result<Vec<f64>> {
        if self.w.len() != data.phi().dims() {
            return Err(Error::DimensionMismatch {
                expected: self.w.len(),
                found: data.phi().dims(),
            });
        }
        Ok(data.phi().iter_rows().map(|row| self.score(row)).collect())
    }
}

fn svm_problem(data: &Dataset, lambda: f64) -> PiecewiseQp {
    let d = data.phi().dims();
    let mut diag = vec![lambda; d + 1];
    diag[d] = 0.0;
    let mut qp = PiecewiseQp::new(diag);
    let zero = vec![0.0; d + 1];
    let mut hinge = vec![0.0; d + 1];
    for (i, row) in data.phi().iter_rows().enumerate() {
        let ys = data.labels()[i].sign();
        for (h, x) in hinge.iter_mut().zip(row) {
            *h = -ys * x;
        }
        hinge[d] = -ys;
        qp.push_sample([(hinge.as_slice(), 1.0), (zero.as_slice(), 0.0)]);
    }
    qp
}

/// Minimizes `(lambda/2)|w|^2 + sum_i max(1 - y_i (w.phi_i + b), 0)` over the
/// classification features only.
pub fn train_svm(data: &Dataset, lambda: f64, cfg: &TrainConfig) -> Result<LinearModel> {
    cfg.validate()?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    let qp = svm_problem(data, lambda);
    let (x, converged, iterations) = match cfg.solver {
        Solver::InteriorPoint => {
            let out = qp.solve(cfg.tolerance, cfg.max_iterations);
            (out.x, out.converged, out.iterations)
        }
        Solver::Subgradient => {
            let start = vec![0.0; data.phi().dims() + 1];
            let out = descent::minimize(&qp, start, cfg);
            (out.x, out.converged, out.iterations)
        }
    };
    let d = data.phi().dims();
    let model = LinearModel {
        w: x[..d].to_vec(),
        b: x[d],
        lambda,
        objective_value: qp.value(&x),
    };
    if !converged {
        return Err(Error::SvmNotConverged {
            iterations,
            objective: model.objective_value,
            best: Box::new(model),
        });
    }
    Ok(model)
}

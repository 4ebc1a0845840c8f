//! Slow reference minimizer for tiny instances.
//!
//! Central-cut ellipsoid method on the unconstrained objective. The
//! objective and its subgradient are evaluated here from scratch rather than
//! through the trainer. Every iterate yields a certified lower bound
//! `F(x_k) - |L^T g_k|` because the minimizer stays inside the current
//! ellipsoid, so the returned model comes with a provable optimality gap.

use nalgebra::{DMatrix, DVector};

use crate::domain::{Dataset, LwrHyperparams, LwrModel};
use crate::error::{Error, Result};

pub const MAX_PARAMS: usize = 6;
pub const MAX_SAMPLES: usize = 12;

const GAP_TOLERANCE: f64 = 1e-9;
const MAX_ITERATIONS: usize = 400_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub model: LwrModel,
    /// Certified lower bound on the optimal objective.
    pub lower_bound: f64,
    pub iterations: usize,
}

impl ReferenceSolution {
    pub fn gap(&self) -> f64 {
        self.model.objective_value - self.lower_bound
    }
}

struct Problem<'a> {
    data: &'a Dataset,
    d: usize,
    dp: usize,
    lambda: f64,
    lambda_prime: f64,
    half_alpha: f64,
    c: f64,
    beta: f64,
}

impl Problem<'_> {
    /// Objective value and one subgradient at `x = (w, b, u, b')`.
    fn eval(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let (d, dp) = (self.d, self.dp);
        let mut g = DVector::zeros(d + dp + 2);
        let mut value = 0.0;
        for k in 0..d {
            value += 0.5 * self.lambda * x[k] * x[k];
            g[k] = self.lambda * x[k];
        }
        for k in 0..dp {
            let v = x[d + 1 + k];
            value += 0.5 * self.lambda_prime * v * v;
            g[d + 1 + k] = self.lambda_prime * v;
        }
        for i in 0..self.data.len() {
            let phi = self.data.phi().row(i);
            let phi_p = self.data.phi_prime().row(i);
            let y = self.data.labels()[i].sign();
            let f = (0..d).map(|k| x[k] * phi[k]).sum::<f64>() + x[d];
            let r = (0..dp).map(|k| x[d + 1 + k] * phi_p[k]).sum::<f64>() + x[d + dp + 1];
            let first = 1.0 + self.half_alpha * (r - y * f);
            let second = self.c * (1.0 - self.beta * r);
            if first >= second && first > 0.0 {
                value += first;
                for k in 0..d {
                    g[k] -= self.half_alpha * y * phi[k];
                }
                g[d] -= self.half_alpha * y;
                for k in 0..dp {
                    g[d + 1 + k] += self.half_alpha * phi_p[k];
                }
                g[d + dp + 1] += self.half_alpha;
            } else if second > 0.0 {
                value += second;
                for k in 0..dp {
                    g[d + 1 + k] -= self.c * self.beta * phi_p[k];
                }
                g[d + dp + 1] -= self.c * self.beta;
            }
        }
        (value, g)
    }

    /// Radius of a ball around the origin that contains a minimizer.
    ///
    /// `F(0) = m` bounds the regularizers, hence `|w|` and `|u|`. With the
    /// weights fixed the objective is piecewise linear in the two biases;
    /// once every rejection term is off and every classification term is
    /// either off or increasing, moving further cannot help, which caps the
    /// biases in terms of `M = max |w.phi|`, `M' = max |u.phi'|`.
    fn radius(&self) -> f64 {
        let m = self.data.len() as f64;
        let max_norm = |rows: &crate::domain::FeatureMatrix| {
            rows.iter_rows()
                .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
                .fold(0.0, f64::max)
        };
        let w_bound = (2.0 * m / self.lambda).sqrt();
        let u_bound = (2.0 * m / self.lambda_prime).sqrt();
        let big_m = w_bound * max_norm(self.data.phi());
        let big_mp = u_bound * max_norm(self.data.phi_prime());
        let inv_cb = 1.0 / (self.c * self.beta);
        let bias_bound = 2.0 * m / self.half_alpha + big_m + 2.0 * big_mp + inv_cb + 2.0;
        // Generous slack; the cost is logarithmic.
        10.0 * (w_bound * w_bound + u_bound * u_bound + 2.0 * bias_bound * bias_bound).sqrt()
    }
}

pub fn reference_solve(data: &Dataset, hyper: LwrHyperparams) -> Result<LwrModel> {
    Ok(reference_solve_certified(data, hyper)?.model)
}

pub fn reference_solve_certified(data: &Dataset, hyper: LwrHyperparams) -> Result<ReferenceSolution> {
    let d = data.phi().dims();
    let dp = data.phi_prime().dims();
    let n = d + dp + 2;
    if n > MAX_PARAMS {
        return Err(Error::TooLarge(format!("{n} parameters, reference solver allows {MAX_PARAMS}")));
    }
    if data.len() > MAX_SAMPLES {
        return Err(Error::TooLarge(format!(
            "{} samples, reference solver allows {MAX_SAMPLES}",
            data.len()
        )));
    }
    let problem = Problem {
        data,
        d,
        dp,
        lambda: hyper.lambda(),
        lambda_prime: hyper.lambda_prime(),
        half_alpha: 0.5 * hyper.alpha(),
        c: hyper.c().value(),
        beta: hyper.beta(),
    };

    let nf = n as f64;
    let expand = (nf * nf / (nf * nf - 1.0)).sqrt();
    let kappa = 1.0 - ((nf - 1.0) / (nf + 1.0)).sqrt();

    let mut center = DVector::<f64>::zeros(n);
    let mut shape = DMatrix::<f64>::identity(n, n) * problem.radius();
    let mut best_x = center.clone();
    let mut best_value = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (value, g) = problem.eval(&center);
        if value < best_value {
            best_value = value;
            best_x.copy_from(&center);
        }
        let lg = shape.transpose() * &g;
        let width = lg.norm();
        lower = lower.max(value - width);
        if best_value - lower <= GAP_TOLERANCE * best_value.max(1.0) || width == 0.0 {
            break;
        }
        let a = lg / width;
        let step = &shape * &a;
        center -= &step / (nf + 1.0);
        shape = (shape - kappa * &step * a.transpose()) * expand;
    }

    let mut model = LwrModel::zeros(d, dp, hyper);
    model.set_params(best_x.as_slice());
    model.objective_value = best_value;
    Ok(ReferenceSolution {
        model,
        lower_bound: lower,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{FeatureMatrix, Label, RejectionCost};

    fn one_d(labels: &[Label], xs: &[f64], xps: &[f64]) -> Dataset {
        let ids: Vec<String> = (0..xs.len()).map(|i| format!("x{i}")).collect();
        Dataset::new(
            labels.to_vec(),
            FeatureMatrix::new(ids.clone(), 1, xs.to_vec()).unwrap(),
            FeatureMatrix::new(ids, 1, xps.to_vec()).unwrap(),
        )
        .unwrap()
    }

    fn hyper(c: f64, lambda: f64, lambda_prime: f64) -> LwrHyperparams {
        LwrHyperparams::new(RejectionCost::new(c).unwrap(), lambda, lambda_prime).unwrap()
    }

    #[test]
    fn certificate_is_tight() {
        let data = one_d(&[Label::Positive, Label::Negative], &[1.0, -1.0], &[1.0, -1.0]);
        let sol = reference_solve_certified(&data, hyper(0.25, 1.0, 1.0)).unwrap();
        assert!(sol.gap() >= 0.0);
        assert!(sol.gap() <= 1e-9 * sol.model.objective_value.max(1.0));
    }

    #[test]
    fn single_sample_first_order_condition() {
        let data = one_d(&[Label::Positive], &[1.0], &[1.0]);
        let sol = reference_solve_certified(&data, hyper(0.25, 1.0, 1.0)).unwrap();
        let p = Problem {
            data: &data,
            d: 1,
            dp: 1,
            lambda: 1.0,
            lambda_prime: 1.0,
            half_alpha: 0.5,
            c: 0.25,
            beta: 2.0,
        };
        let x = DVector::from_vec(sol.model.params());
        let base = p.eval(&x).0;
        let h = 1e-6;
        for k in 0..4 {
            for sign in [1.0, -1.0] {
                let mut y = x.clone();
                y[k] += sign * h;
                let slope = (p.eval(&y).0 - base) / h;
                assert!(slope >= -1e-4, "coordinate {k} direction {sign}: {slope}");
            }
        }
    }

    #[test]
    fn size_preconditions() {
        let ids: Vec<String> = (0..2).map(|i| i.to_string()).collect();
        let data = Dataset::new(
            vec![Label::Positive, Label::Negative],
            FeatureMatrix::new(ids.clone(), 3, vec![0.0; 6]).unwrap(),
            FeatureMatrix::new(ids, 2, vec![0.0; 4]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            reference_solve(&data, hyper(0.2, 1.0, 1.0)),
            Err(Error::TooLarge(_))
        ));
        let xs: Vec<f64> = (0..13).map(f64::from).collect();
        let labels = vec![Label::Positive; 13];
        let data = one_d(&labels, &xs, &xs);
        assert!(matches!(
            reference_solve(&data, hyper(0.2, 1.0, 1.0)),
            Err(Error::TooLarge(_))
        ));
    }
}

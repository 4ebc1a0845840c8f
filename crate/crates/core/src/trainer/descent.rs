//! Subgradient descent with best-iterate tracking.

use super::TrainConfig;

const WINDOW: usize = 50;

/// A convex function with a deterministic subgradient oracle.
pub(crate) trait Subdifferentiable {
    fn value(&self, x: &[f64]) -> f64;
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;
}

pub(crate) struct DescentOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

/// Normalized subgradient steps from `start`. Stops when the best objective
/// improved by less than `tolerance` (relative) over the last 50 iterations
/// or when the subgradient norm drops below `tolerance`.
pub(crate) fn minimize(f: &impl Subdifferentiable, start: Vec<f64>, cfg: &TrainConfig) -> DescentOutcome {
    let mut x = start;
    let mut best = x.clone();
    let mut best_obj = f.value(&x);
    let mut history = Vec::new();
    let mut converged = false;

    for k in 0..cfg.max_iterations {
        let g = f.subgradient(&x);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < cfg.tolerance {
            converged = true;
            break;
        }
        let step = cfg.step_schedule.step(k) / norm;
        for (p, gi) in x.iter_mut().zip(&g) {
            *p -= step * gi;
        }
        let obj = f.value(&x);
        if obj < best_obj {
            best_obj = obj;
            best.copy_from_slice(&x);
        }
        history.push(best_obj);

        if history.len() > WINDOW {
            let old = history[history.len() - 1 - WINDOW];
            if old - best_obj <= cfg.tolerance * old.abs().max(1e-12) {
                converged = true;
                break;
            }
        }
    }

    DescentOutcome {
        x: best,
        iterations: history.len(),
        converged,
        history,
    }
}

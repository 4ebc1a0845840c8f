//! Bayes-optimal rejection for the Gaussian benchmark: reject exactly when
//! the larger class posterior is below `1 - c`, otherwise predict the more
//! probable class.

use serde::{Deserialize, Serialize};

use super::synth::GaussianMixtureSpec;
use crate::domain::{Decision, RejectionCost};

/// Number of Simpson panels per smooth segment of the integrand.
const PANELS: usize = 4_000;
/// Integration half-width around the class means, in standard deviations.
const TAIL_SIGMAS: f64 = 14.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChowRule {
    spec: GaussianMixtureSpec,
    /// Reject iff `|log-odds| < log_odds_margin`.
    pub log_odds_margin: f64,
}

impl ChowRule {
    pub fn new(spec: &GaussianMixtureSpec, c: RejectionCost) -> Self {
        let c = c.value();
        ChowRule {
            spec: spec.clone(),
            log_odds_margin: ((1.0 - c) / c).ln(),
        }
    }

    pub fn decide(&self, x: &[f64]) -> Decision {
        let eta = self.spec.log_odds(x);
        if eta.abs() < self.log_odds_margin {
            Decision::Reject
        } else if eta > 0.0 {
            Decision::AcceptPositive
        } else {
            Decision::AcceptNegative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChowOracle {
    pub rule: ChowRule,
    /// Expected per-sample risk of the rule.
    pub risk: f64,
}

fn normal_pdf(t: f64, mean: f64, sd: f64) -> f64 {
    let z = (t - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Decision rule and its risk. The risk integrates
/// `min(pi+ p+(t), pi- p-(t), c (pi+ p+(t) + pi- p-(t)))` along the
/// discriminant axis, split at the points where the minimum switches so
/// each piece is smooth.
pub fn chow_oracle(spec: &GaussianMixtureSpec, c: RejectionCost) -> ChowOracle {
    let rule = ChowRule::new(spec, c);
    let cv = c.value();
    let prior = spec.prior_plus;
    let diff: Vec<f64> = spec.mu_plus.iter().zip(&spec.mu_minus).map(|(a, b)| a - b).collect();
    let gap = diff.iter().map(|v| v * v).sum::<f64>().sqrt();

    let risk = if gap == 0.0 {
        // Posterior equals the prior everywhere.
        if prior.max(1.0 - prior) < 1.0 - cv {
            cv
        } else {
            prior.min(1.0 - prior)
        }
    } else {
        let axis: Vec<f64> = diff.iter().map(|v| v / gap).collect();
        let proj = |mu: &[f64]| mu.iter().zip(&axis).map(|(a, b)| a * b).sum::<f64>();
        let (m_plus, m_minus) = (proj(&spec.mu_plus), proj(&spec.mu_minus));
        let sd = spec.sigma;
        let s2 = sd * sd;
        let offset = (prior / (1.0 - prior)).ln() - (m_plus * m_plus - m_minus * m_minus) / (2.0 * s2);
        let slope = gap / s2;
        let at_log_odds = |eta: f64| (eta - offset) / slope;

        let lo = m_plus.min(m_minus) - TAIL_SIGMAS * sd;
        let hi = m_plus.max(m_minus) + TAIL_SIGMAS * sd;
        let mut cuts = vec![lo, hi];
        for eta in [-rule.log_odds_margin, 0.0, rule.log_odds_margin] {
            let t = at_log_odds(eta);
            if t > lo && t < hi {
                cuts.push(t);
            }
        }
        cuts.sort_by(f64::total_cmp);

        let integrand = |t: f64| {
            let plus = prior * normal_pdf(t, m_plus, sd);
            let minus = (1.0 - prior) * normal_pdf(t, m_minus, sd);
            plus.min(minus).min(cv * (plus + minus))
        };
        cuts.windows(2)
            .map(|w| simpson(integrand, w[0], w[1], PANELS))
            .sum()
    };
    ChowOracle { rule, risk }
}

//! Cost-sensitive risk, selective accuracy, rejection rate and tradeoff
//! curves.

use serde::{Deserialize, Serialize};

use crate::domain::{Decision, Label, RejectionCost};
use crate::error::{Error, Result};

/// Loss of one decision: 1 for an accepted mistake, `c` for a rejection.
pub fn pointwise_loss(decision: Decision, y: Label, c: RejectionCost) -> f64 {
    match decision.predicted() {
        None => c.value(),
        Some(pred) if pred != y => 1.0,
        Some(_) => 0.0,
    }
}

fn check_lengths(decisions: &[Decision], labels: &[Label]) -> Result<()> {
    if decisions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: decisions.len(),
            right: labels.len(),
        });
    }
    Ok(())
}

/// `#(accepted and wrong) + c * #(rejected)`.
pub fn risk_lwr(decisions: &[Decision], labels: &[Label], c: RejectionCost) -> Result<f64> {
    check_lengths(decisions, labels)?;
    let counts = Counts::tally(decisions, labels);
    Ok(counts.wrong as f64 + c.value() * counts.rejected as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub correct: usize,
    pub wrong: usize,
    pub rejected: usize,
}

impl Counts {
    pub fn tally(decisions: &[Decision], labels: &[Label]) -> Self {
        let mut counts = Counts::default();
        for (d, y) in decisions.iter().zip(labels) {
            match d.predicted() {
                None => counts.rejected += 1,
                Some(p) if p == *y => counts.correct += 1,
                Some(_) => counts.wrong += 1,
            }
        }
        counts
    }

    pub fn total(&self) -> usize {
        self.correct + self.wrong + self.rejected
    }

    pub fn accepted(&self) -> usize {
        self.correct + self.wrong
    }
}

/// Selective accuracy and rejection rate. Accuracy is `None` when every
/// sample was rejected.
pub fn metrics(decisions: &[Decision], labels: &[Label]) -> Result<(Option<f64>, f64)> {
    check_lengths(decisions, labels)?;
    if decisions.is_empty() {
        return Err(Error::Empty("no decisions to score".into()));
    }
    let counts = Counts::tally(decisions, labels);
    let accuracy = (counts.accepted() > 0).then(|| counts.correct as f64 / counts.accepted() as f64);
    Ok((accuracy, counts.rejected as f64 / counts.total() as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub c: RejectionCost,
    pub risk_total: f64,
    pub risk_per_sample: f64,
    /// `None` when every sample was rejected.
    pub accuracy_nonrejected: Option<f64>,
    pub rejection_rate: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub decisions: Vec<Decision>,
}

impl EvalReport {
    pub fn new(decisions: Vec<Decision>, labels: &[Label], c: RejectionCost) -> Result<Self> {
        let risk_total = risk_lwr(&decisions, labels, c)?;
        let (accuracy_nonrejected, rejection_rate) = metrics(&decisions, labels)?;
        let counts = Counts::tally(&decisions, labels);
        Ok(EvalReport {
            c,
            risk_total,
            risk_per_sample: risk_total / decisions.len() as f64,
            accuracy_nonrejected,
            rejection_rate,
            accepted: counts.accepted(),
            rejected: counts.rejected,
            decisions,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub c: f64,
    pub rejection_rate: f64,
    pub accuracy: Option<f64>,
    pub risk_per_sample: f64,
}

/// One row per run, sorted by ascending cost. Repeated costs are rejected.
pub fn tradeoff_curve(runs: &[EvalReport]) -> Result<Vec<CurveRow>> {
    if runs.is_empty() {
        return Err(Error::Empty("no runs for the tradeoff curve".into()));
    }
    let mut rows: Vec<CurveRow> = runs
        .iter()
        .map(|r| CurveRow {
            c: r.c.value(),
            rejection_rate: r.rejection_rate,
            accuracy: r.accuracy_nonrejected,
            risk_per_sample: r.risk_per_sample,
        })
        .collect();
    rows.sort_by(|a, b| a.c.total_cmp(&b.c));
    if let Some(w) = rows.windows(2).find(|w| w[0].c == w[1].c) {
        return Err(Error::DuplicateCost(w[0].c));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use Decision::{AcceptNegative as Neg, AcceptPositive as Pos, Reject as Rej};
    use Label::{Negative as N, Positive as P};

    fn cost(c: f64) -> RejectionCost {
        RejectionCost::new(c).unwrap()
    }

    #[test]
    fn risk_examples() {
        assert_eq!(risk_lwr(&[Pos, Neg, Pos], &[P, N, P], cost(0.2)).unwrap(), 0.0);
        let all_rej = vec![Rej; 10];
        let labels = vec![P; 10];
        assert!((risk_lwr(&all_rej, &labels, cost(0.3)).unwrap() - 3.0).abs() < 1e-12);

        // 2 accepted wrong, 3 rejected, 1 correct.
        let d = [Pos, Neg, Rej, Rej, Rej, Pos];
        let y = [N, P, P, N, P, P];
        let expected = 2.0 + 3.0 * 0.2;
        assert!((risk_lwr(&d, &y, cost(0.2)).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 2.6).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(risk_lwr(&[Pos], &[P, N], cost(0.1)).is_err());
        assert!(metrics(&[], &[]).is_err());
    }

    #[test]
    fn metrics_examples() {
        let mut d = vec![Pos; 8];
        d.extend([Rej, Rej]);
        let y = vec![P; 10];
        assert_eq!(metrics(&d, &y).unwrap(), (Some(1.0), 0.2));

        let d = vec![Pos; 10];
        let y: Vec<Label> = (0..10).map(|i| if i < 5 { P } else { N }).collect();
        assert_eq!(metrics(&d, &y).unwrap(), (Some(0.5), 0.0));

        assert_eq!(metrics(&[Rej, Rej], &[P, N]).unwrap(), (None, 1.0));
    }

    fn report(c: f64, decisions: Vec<Decision>) -> EvalReport {
        let labels = vec![P; decisions.len()];
        EvalReport::new(decisions, &labels, cost(c)).unwrap()
    }

    #[test]
    fn curve_rows() {
        let single = tradeoff_curve(&[report(0.3, vec![Pos, Rej])]).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].c, 0.3);
        assert_eq!(single[0].rejection_rate, 0.5);
        assert_eq!(single[0].accuracy, Some(1.0));

        let runs: Vec<_> = [0.4, 0.1, 0.3, 0.2]
            .into_iter()
            .map(|c| report(c, vec![Pos, Neg]))
            .collect();
        let rows = tradeoff_curve(&runs).unwrap();
        let cs: Vec<f64> = rows.iter().map(|r| r.c).collect();
        assert_eq!(cs, vec![0.1, 0.2, 0.3, 0.4]);

        let dup = [report(0.2, vec![Pos]), report(0.2, vec![Rej])];
        assert!(matches!(tradeoff_curve(&dup), Err(Error::DuplicateCost(_))));
        assert!(tradeoff_curve(&[]).is_err());
    }

    fn decision_strategy() -> impl Strategy<Value = Decision> {
        prop_oneof![Just(Pos), Just(Neg), Just(Rej)]
    }

    fn label_strategy() -> impl Strategy<Value = Label> {
        prop_oneof![Just(P), Just(N)]
    }

    proptest! {
        #[test]
        fn risk_decomposes(
            pairs in prop::collection::vec((decision_strategy(), label_strategy()), 1..60),
            c in 0.01f64..0.49,
        ) {
            let (d, y): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            let rep = EvalReport::new(d, &y, cost(c)).unwrap();
            if let Some(acc) = rep.accuracy_nonrejected {
                let rebuilt = (1.0 - acc) * rep.accepted as f64 + c * rep.rejected as f64;
                prop_assert!((rebuilt - rep.risk_total).abs() < 1e-9);
                let correct = acc * rep.accepted as f64;
                prop_assert!((correct - correct.round()).abs() < 1e-9);
            }
            prop_assert_eq!(rep.rejection_rate, rep.rejected as f64 / y.len() as f64);
        }

        #[test]
        fn risk_is_permutation_invariant_and_affine_in_cost(
            pairs in prop::collection::vec((decision_strategy(), label_strategy()), 1..60),
            c1 in 0.01f64..0.49,
            c2 in 0.01f64..0.49,
            rotate in 0usize..60,
        ) {
            let (d, y): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            let base = risk_lwr(&d, &y, cost(c1)).unwrap();
            let k = rotate % d.len();
            let mut d2 = d.clone();
            let mut y2 = y.clone();
            d2.rotate_left(k);
            y2.rotate_left(k);
            d2.reverse();
            y2.reverse();
            prop_assert!((risk_lwr(&d2, &y2, cost(c1)).unwrap() - base).abs() < 1e-9);

            let rejected = d.iter().filter(|x| x.is_reject()).count() as f64;
            let other = risk_lwr(&d, &y, cost(c2)).unwrap();
            prop_assert!((other - base - (c2 - c1) * rejected).abs() < 1e-9);
        }
    }
}

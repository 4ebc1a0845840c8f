//! Value types shared by every module: labels, feature matrices, datasets,
//! hyperparameters, trained models and the three-way decision rule.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// `+1.0` or `-1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

impl TryFrom<i64> for Label {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        match value {
            1 => Ok(Label::Positive),
            -1 => Ok(Label::Negative),
            other => Err(Error::InvalidLabel(other)),
        }
    }
}

impl From<Label> for i64 {
    fn from(label: Label) -> i64 {
        match label {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }
}

/// Dense row-major `m x d` matrix of finite reals with one unique id per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    ids: Vec<String>,
    dims: usize,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(ids: Vec<String>, dims: usize, values: Vec<f64>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::Empty("feature matrix has no rows".into()));
        }
        if dims == 0 {
            return Err(Error::Empty("feature matrix has no columns".into()));
        }
        if values.len() != ids.len() * dims {
            return Err(Error::DimensionMismatch {
                expected: ids.len() * dims,
                found: values.len(),
            });
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let row = pos / dims;
            return Err(Error::NonFinite {
                id: ids[row].clone(),
                row,
                col: pos % dims,
            });
        }
        Ok(FeatureMatrix { ids, dims, values })
    }

    /// Builds a matrix from rows; all rows must share one length.
    pub fn from_rows(ids: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let dims = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * dims);
        for row in rows {
            if row.len() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(ids, dims, values)
    }

    pub fn rows(&self) -> usize {
        self.ids.len()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dims..(i + 1) * self.dims]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dims)
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let ids = indices.iter().map(|&i| self.ids[i].clone()).collect();
        let mut values = Vec::with_capacity(indices.len() * self.dims);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self::new(ids, self.dims, values)
    }

    /// Applies `f(column, value)` to every entry.
    pub fn map_values(&self, mut f: impl FnMut(usize, f64) -> f64) -> Result<Self> {
        let dims = self.dims;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| f(k % dims, v))
            .collect();
        Self::new(self.ids.clone(), dims, values)
    }
}

/// Labeled samples seen through two feature spaces: `phi` for the classifier
/// and `phi_prime` for the rejector. Both matrices list the same ids in the
/// same order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    labels: Vec<Label>,
    phi: FeatureMatrix,
    phi_prime: FeatureMatrix,
}

impl Dataset {
    pub fn new(labels: Vec<Label>, phi: FeatureMatrix, phi_prime: FeatureMatrix) -> Result<Self> {
        if phi.rows() != labels.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: phi.rows(),
            });
        }
        if phi_prime.rows() != labels.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: phi_prime.rows(),
            });
        }
        if let Some((a, b)) = phi
            .ids()
            .iter()
            .zip(phi_prime.ids())
            .find(|(a, b)| a != b)
        {
            return Err(Error::InvalidParameter(format!(
                "feature spaces are not aligned: `{a}` vs `{b}`"
            )));
        }
        Ok(Dataset {
            labels,
            phi,
            phi_prime,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn phi(&self) -> &FeatureMatrix {
        &self.phi
    }

    pub fn phi_prime(&self) -> &FeatureMatrix {
        &self.phi_prime
    }

    pub fn ids(&self) -> &[String] {
        self.phi.ids()
    }

    pub fn has_both_labels(&self) -> bool {
        let pos = self.labels.iter().filter(|&&l| l == Label::Positive).count();
        pos > 0 && pos < self.labels.len()
    }

    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        Dataset::new(
            indices.iter().map(|&i| self.labels[i]).collect(),
            self.phi.select(indices)?,
            self.phi_prime.select(indices)?,
        )
    }

    /// Same samples with replaced feature matrices (e.g. after normalization).
    pub fn with_features(&self, phi: FeatureMatrix, phi_prime: FeatureMatrix) -> Result<Self> {
        if phi.ids() != self.ids() {
            return Err(Error::param("replacement features have different ids"));
        }
        Dataset::new(self.labels.clone(), phi, phi_prime)
    }
}

/// Cost of rejecting one sample, relative to a unit misclassification cost.
/// Always strictly inside `(0, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RejectionCost(f64);

impl RejectionCost {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 && c < 0.5 {
            Ok(RejectionCost(c))
        } else {
            Err(Error::param(format!("rejection cost must lie in (0, 1/2), got {c}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RejectionCost {
    type Error = Error;

    fn try_from(c: f64) -> Result<Self> {
        RejectionCost::new(c)
    }
}

impl From<RejectionCost> for f64 {
    fn from(c: RejectionCost) -> f64 {
        c.0
    }
}

/// `1 / (1 - 2c)`, the rejector slope used by the surrogate loss.
pub fn beta_of(c: RejectionCost) -> f64 {
    1.0 / (1.0 - 2.0 * c.value())
}

/// Hyperparameters of the joint objective. `alpha` is fixed at 1 and `beta`
/// is derived from the cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HyperparamsRepr", into = "HyperparamsRepr")]
pub struct LwrHyperparams {
    c: RejectionCost,
    lambda: f64,
    lambda_prime: f64,
    alpha: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
struct HyperparamsRepr {
    c: f64,
    lambda: f64,
    lambda_prime: f64,
}

impl TryFrom<HyperparamsRepr> for LwrHyperparams {
    type Error = Error;

    fn try_from(r: HyperparamsRepr) -> Result<Self> {
        LwrHyperparams::new(RejectionCost::new(r.c)?, r.lambda, r.lambda_prime)
    }
}

impl From<LwrHyperparams> for HyperparamsRepr {
    fn from(h: LwrHyperparams) -> Self {
        HyperparamsRepr {
            c: h.c.value(),
            lambda: h.lambda,
            lambda_prime: h.lambda_prime,
        }
    }
}

impl LwrHyperparams {
    pub fn new(c: RejectionCost, lambda: f64, lambda_prime: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::param(format!("lambda must be positive, got {lambda}")));
        }
        if !(lambda_prime.is_finite() && lambda_prime > 0.0) {
            return Err(Error::param(format!(
                "lambda' must be positive, got {lambda_prime}"
            )));
        }
        Ok(LwrHyperparams {
            c,
            lambda,
            lambda_prime,
            alpha: 1.0,
            beta: beta_of(c),
        })
    }

    pub fn c(&self) -> RejectionCost {
        self.c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_prime(&self) -> f64 {
        self.lambda_prime
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Outcome of the three-way decision rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    AcceptPositive,
    AcceptNegative,
    Reject,
}

impl Decision {
    pub fn is_reject(self) -> bool {
        self == Decision::Reject
    }

    /// Predicted label for accepted samples.
    pub fn predicted(self) -> Option<Label> {
        match self {
            Decision::AcceptPositive => Some(Label::Positive),
            Decision::AcceptNegative => Some(Label::Negative),
            Decision::Reject => None,
        }
    }
}

/// Rejects when `r_val <= 0`; otherwise predicts `+1` when `f_val > 0` and
/// `-1` when `f_val <= 0`.
pub fn decide(f_val: f64, r_val: f64) -> Decision {
    if r_val <= 0.0 {
        Decision::Reject
    } else if f_val > 0.0 {
        Decision::AcceptPositive
    } else {
        Decision::AcceptNegative
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jointly trained linear classifier `f = w.phi + b` and rejector
/// `r = u.phi' + b'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LwrModel {
    pub w: Vec<f64>,
    pub b: f64,
    pub u: Vec<f64>,
    pub b_prime: f64,
    pub hyper: LwrHyperparams,
    pub objective_value: f64,
}

impl LwrModel {
    /// All-zero parameters. The objective is filled in by the caller.
    pub fn zeros(phi_dims: usize, phi_prime_dims: usize, hyper: LwrHyperparams) -> Self {
        LwrModel {
            w: vec![0.0; phi_dims],
            b: 0.0,
            u: vec![0.0; phi_prime_dims],
            b_prime: 0.0,
            hyper,
            objective_value: 0.0,
        }
    }

    pub fn check_dims(&self, data: &Dataset) -> Result<()> {
        if self.w.len() != data.phi().dims() {
            return Err(Error::DimensionMismatch {
                expected: self.w.len(),
                found: data.phi().dims(),
            });
        }
        if self.u.len() != data.phi_prime().dims() {
            return Err(Error::DimensionMismatch {
                expected: self.u.len(),
                found: data.phi_prime().dims(),
            });
        }
        Ok(())
    }

    pub fn classify_score(&self, phi_row: &[f64]) -> f64 {
        dot(&self.w, phi_row) + self.b
    }

    pub fn reject_score(&self, phi_prime_row: &[f64]) -> f64 {
        dot(&self.u, phi_prime_row) + self.b_prime
    }

    /// `(f_i, r_i)` for sample `i`.
    pub fn scores(&self, data: &Dataset, i: usize) -> (f64, f64) {
        (
            self.classify_score(data.phi().row(i)),
            self.reject_score(data.phi_prime().row(i)),
        )
    }

    pub fn decisions(&self, data: &Dataset) -> Result<Vec<Decision>> {
        self.check_dims(data)?;
        Ok((0..data.len())
            .map(|i| {
                let (f, r) = self.scores(data, i);
                decide(f, r)
            })
            .collect())
    }

    /// Flattened parameter vector `(w, b, u, b')`.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.w.len() + self.u.len() + 2);
        p.extend_from_slice(&self.w);
        p.push(self.b);
        p.extend_from_slice(&self.u);
        p.push(self.b_prime);
        p
    }

    /// Inverse of [`LwrModel::params`].
    pub fn set_params(&mut self, p: &[f64]) {
        let d = self.w.len();
        let dp = self.u.len();
        assert_eq!(p.len(), d + dp + 2, "parameter vector has wrong length");
        self.w.copy_from_slice(&p[..d]);
        self.b = p[d];
        self.u.copy_from_slice(&p[d + 1..d + 1 + dp]);
        self.b_prime = p[d + 1 + dp];
    }
}

//! Learning with rejection for binary classification.
//!
//! A linear classifier `f(x) = w.phi(x) + b` and a linear rejector
//! `r(x) = u.phi'(x) + b'` are trained jointly by minimizing a regularized
//! convex surrogate of the cost-sensitive risk
//!
//! ```text
//! R(f, r) = sum_i [ 1{sgn f(x_i) != y_i, r(x_i) > 0} + c 1{r(x_i) <= 0} ]
//! ```
//!
//! The classifier and rejector may use different feature spaces. The crate
//! also provides confidence-threshold baselines, evaluation metrics, a
//! synthetic Gaussian benchmark with its Bayes-optimal rejection rule, and
//! independent reference solvers used for validation.

pub mod baselines;
pub mod data;
pub mod domain;
pub mod error;
pub mod evaluation;
pub mod oracle;
pub mod trainer;

pub use domain::{
    beta_of, decide, Dataset, Decision, FeatureMatrix, Label, LwrHyperparams, LwrModel,
    RejectionCost,
};
pub use error::{Error, Result};
pub use trainer::{train, TrainConfig, TrainReport, Trained};

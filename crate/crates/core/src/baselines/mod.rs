//! Comparison systems: a calibrated linear SVM and any external probability
//! source, both turned into rejecting classifiers by a confidence threshold
//! tuned for validation risk.

mod calibration;
mod svm;
mod threshold;

pub use calibration::{fit_calibration, sigmoid, CalibratedLinearModel, SLOPE_CAP};
pub use svm::{train_svm, LinearModel};
pub use threshold::{
    threshold_decide, threshold_risk, tune_threshold, ProbabilitySource, ThresholdModel,
    TunedThreshold,
};

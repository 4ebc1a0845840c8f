//! Independent reference computations: a certified minimizer for tiny
//! instances, empirical Rademacher complexity and the generalization-gap
//! diagnostic.

mod gap;
mod rademacher;
mod reference;

pub use gap::{generalization_gap_report, generalization_gap_report_with, GapReport, DEFAULT_DRAWS};
pub use rademacher::{empirical_rademacher, exact_rademacher, RademacherEstimate, MAX_ENUMERATION};
pub use reference::{reference_solve, reference_solve_certified, ReferenceSolution, MAX_PARAMS, MAX_SAMPLES};

//! File ingestion, splitting, normalization and the synthetic benchmark.

mod chow;
pub mod io;
mod normalize;
mod split;
mod synth;

pub use chow::{chow_oracle, ChowOracle, ChowRule};
pub use io::{load_dataset, load_features, load_labels, load_probabilities, write_dataset, DatasetFiles};
pub use normalize::ZScore;
pub use split::{split, SplitSpec};
pub use synth::{synth_gaussian, GaussianMixtureSpec, SecondSpace};

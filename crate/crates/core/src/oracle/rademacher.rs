use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::FeatureMatrix;
use crate::error::{Error, Result};

/// Largest sample count for which [`exact_rademacher`] enumerates all sign vectors.
pub const MAX_ENUMERATION: usize = 20;

/// Empirical Rademacher complexity of `{x -> w.phi(x) : |w| <= B}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RademacherEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub num_draws: usize,
    pub norm_bound: f64,
}

/// `|sum_i sigma_i phi_i|` with `sigma_i = +1` where `positive(i)`.
fn signed_norm(features: &FeatureMatrix, positive: impl Fn(usize) -> bool, acc: &mut [f64]) -> f64 {
    acc.iter_mut().for_each(|v| *v = 0.0);
    for (i, row) in features.iter_rows().enumerate() {
        let s = if positive(i) { 1.0 } else { -1.0 };
        for (a, v) in acc.iter_mut().zip(row) {
            *a += s * v;
        }
    }
    acc.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Running mean and variance; identical samples give an exactly zero variance.
#[derive(Default)]
struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let var = self.m2 / (self.n - 1) as f64;
        (var / self.n as f64).sqrt()
    }
}

fn check_bound(norm_bound: f64) -> Result<()> {
    if !(norm_bound.is_finite() && norm_bound > 0.0) {
        return Err(Error::param(format!("norm bound must be positive, got {norm_bound}")));
    }
    Ok(())
}

/// Monte-Carlo estimate of `(B/m) E_sigma |sum_i sigma_i phi_i|` over
/// `num_draws` seeded sign vectors.
pub fn empirical_rademacher(
    features: &FeatureMatrix,
    norm_bound: f64,
    num_draws: usize,
    seed: u64,
) -> Result<RademacherEstimate> {
    check_bound(norm_bound)?;
    if num_draws == 0 {
        return Err(Error::param("num_draws must be at least 1"));
    }
    let m = features.rows();
    let scale = norm_bound / m as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut signs = vec![false; m];
    let mut acc = vec![0.0; features.dims()];
    let mut stats = Welford::default();
    for _ in 0..num_draws {
        signs.iter_mut().for_each(|s| *s = rng.random::<bool>());
        stats.push(scale * signed_norm(features, |i| signs[i], &mut acc));
    }
    Ok(RademacherEstimate {
        mean: stats.mean,
        std_error: stats.std_error(),
        num_draws,
        norm_bound,
    })
}

/// Same expectation computed by enumerating all `2^m` sign vectors.
/// The standard error is reported as zero.
pub fn exact_rademacher(features: &FeatureMatrix, norm_bound: f64) -> Result<RademacherEstimate> {
    check_bound(norm_bound)?;
    let m = features.rows();
    if m > MAX_ENUMERATION {
        return Err(Error::TooLarge(format!(
            "{m} samples, enumeration allows {MAX_ENUMERATION}"
        )));
    }
    let scale = norm_bound / m as f64;
    let patterns = 1usize << m;
    let mut acc = vec![0.0; features.dims()];
    let mut stats = Welford::default();
    for mask in 0..patterns {
        stats.push(scale * signed_norm(features, |i| mask >> i & 1 == 1, &mut acc));
    }
    Ok(RademacherEstimate {
        mean: stats.mean,
        std_error: 0.0,
        num_draws: patterns,
        norm_bound,
    })
}

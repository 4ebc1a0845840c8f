use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::Dataset;
use crate::error::{Error, Result};

/// Fractions of a seeded shuffle assigned to each part, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    fractions: Vec<f64>,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(fractions: Vec<f64>, seed: u64) -> Result<Self> {
        if fractions.is_empty() {
            return Err(Error::param("split needs at least one fraction"));
        }
        if fractions.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::param("split fractions must be positive"));
        }
        let total: f64 = fractions.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param(format!("split fractions sum to {total}, not 1")));
        }
        Ok(SplitSpec { fractions, seed })
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    /// Part sizes for `m` samples by largest remainder; earlier parts win ties.
    pub fn sizes(&self, m: usize) -> Vec<usize> {
        let exact: Vec<f64> = self.fractions.iter().map(|f| f * m as f64).collect();
        let mut sizes: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
        let mut left = m.saturating_sub(sizes.iter().sum::<usize>());
        let mut order: Vec<usize> = (0..sizes.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &k in order.iter().cycle() {
            if left == 0 {
                break;
            }
            sizes[k] += 1;
            left -= 1;
        }
        sizes
    }
}

/// Disjoint parts covering every sample. Rows inside a part keep their
/// original relative order.
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<Vec<Dataset>> {
    let sizes = spec.sizes(data.len());
    if let Some(k) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::param(format!("split part {k} would be empty")));
    }
    let mut indices: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    indices.shuffle(&mut rng);

    let mut parts = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for size in sizes {
        let mut part = indices[start..start + size].to_vec();
        part.sort_unstable();
        parts.push(data.select(&part)?);
        start += size;
    }
    Ok(parts)
}

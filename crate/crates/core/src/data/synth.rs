//! Two-class isotropic Gaussian benchmark.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::domain::{dot, Dataset, FeatureMatrix, Label};
use crate::error::{Error, Result};

/// Class-conditional `N(mu, sigma^2 I)` with prior `prior_plus` on `+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixtureSpec {
    pub mu_plus: Vec<f64>,
    pub mu_minus: Vec<f64>,
    pub sigma: f64,
    pub prior_plus: f64,
}

impl GaussianMixtureSpec {
    pub fn new(mu_plus: Vec<f64>, mu_minus: Vec<f64>, sigma: f64, prior_plus: f64) -> Result<Self> {
        let spec = GaussianMixtureSpec {
            mu_plus,
            mu_minus,
            sigma,
            prior_plus,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Means `+mean` and `-mean`, equal priors.
    pub fn symmetric(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        let neg = mean.iter().map(|v| -v).collect();
        Self::new(mean, neg, sigma, 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu_plus.is_empty() {
            return Err(Error::param("mixture dimension must be at least 1"));
        }
        if self.mu_plus.len() != self.mu_minus.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mu_plus.len(),
                found: self.mu_minus.len(),
            });
        }
        if self.mu_plus.iter().chain(&self.mu_minus).any(|v| !v.is_finite()) {
            return Err(Error::param("mixture means must be finite"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::param(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.prior_plus > 0.0 && self.prior_plus < 1.0) {
            return Err(Error::param(format!("prior must lie in (0, 1), got {}", self.prior_plus)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mu_plus.len()
    }

    /// Log-odds `log p(+1|x) / p(-1|x)`.
    pub fn log_odds(&self, x: &[f64]) -> f64 {
        let s2 = self.sigma * self.sigma;
        let diff: Vec<f64> = self.mu_plus.iter().zip(&self.mu_minus).map(|(a, b)| a - b).collect();
        let norm_plus = dot(&self.mu_plus, &self.mu_plus);
        let norm_minus = dot(&self.mu_minus, &self.mu_minus);
        (self.prior_plus / (1.0 - self.prior_plus)).ln() + dot(&diff, x) / s2
            - (norm_plus - norm_minus) / (2.0 * s2)
    }
}

/// How the rejector's feature space is derived from the raw coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SecondSpace {
    /// Same coordinates as the classifier.
    Identity,
    /// Seeded random orthogonal map to `dims` coordinates.
    RandomProjection { dims: usize },
    /// Raw coordinates followed by their squares.
    SquaredAppended,
}

fn random_projection(rng: &mut ChaCha8Rng, from: usize, to: usize) -> DMatrix<f64> {
    let size = from.max(to);
    let gauss = DMatrix::<f64>::from_fn(size, size, |_, _| rng.sample(StandardNormal));
    let q = gauss.qr().q();
    q.view((0, 0), (to, from)).into_owned()
}

/// `m` i.i.d. samples. Labels come from the prior; ids are `s0`, `s1`, ...
pub fn synth_gaussian(spec: &GaussianMixtureSpec, m: usize, second: SecondSpace, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    if m == 0 {
        return Err(Error::param("sample count must be at least 1"));
    }
    let d = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let projection = match second {
        SecondSpace::RandomProjection { dims } => {
            if dims == 0 {
                return Err(Error::param("projection dims must be at least 1"));
            }
            Some(random_projection(&mut rng, d, dims))
        }
        _ => None,
    };

    let mut labels = Vec::with_capacity(m);
    let mut raw = Vec::with_capacity(m * d);
    for _ in 0..m {
        let label = if rng.random::<f64>() < spec.prior_plus {
            Label::Positive
        } else {
            Label::Negative
        };
        let mu = match label {
            Label::Positive => &spec.mu_plus,
            Label::Negative => &spec.mu_minus,
        };
        for mean in mu {
            let z: f64 = rng.sample(StandardNormal);
            raw.push(mean + spec.sigma * z);
        }
        labels.push(label);
    }

    let ids: Vec<String> = (0..m).map(|i| format!("s{i}")).collect();
    let phi = FeatureMatrix::new(ids.clone(), d, raw)?;
    let phi_prime = match second {
        SecondSpace::Identity => phi.clone(),
        SecondSpace::SquaredAppended => {
            let mut values = Vec::with_capacity(2 * m * d);
            for row in phi.iter_rows() {
                values.extend_from_slice(row);
                values.extend(row.iter().map(|v| v * v));
            }
            FeatureMatrix::new(ids, 2 * d, values)?
        }
        SecondSpace::RandomProjection { dims } => {
            let p = projection.expect("drawn above");
            let mut values = Vec::with_capacity(m * dims);
            for row in phi.iter_rows() {
                for r in 0..dims {
                    values.push((0..d).map(|k| p[(r, k)] * row[k]).sum());
                }
            }
            FeatureMatrix::new(ids, dims, values)?
        }
    };
    Dataset::new(labels, phi, phi_prime)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_labels_for_symmetric_spec() {
        let spec = GaussianMixtureSpec::symmetric(vec![1.0, -0.5], 1.0).unwrap();
        let data = synth_gaussian(&spec, 10_000, SecondSpace::Identity, 11).unwrap();
        let pos = data.labels().iter().filter(|&&l| l == Label::Positive).count() as f64;
        // Binomial sd is 0.005; 0.02 is four of them.
        assert!((pos / 10_000.0 - 0.5).abs() < 0.02);
    }

    #[test]
    fn identity_space_duplicates_phi() {
        let spec = GaussianMixtureSpec::symmetric(vec![1.0, 2.0, 0.0], 0.7).unwrap();
        let data = synth_gaussian(&spec, 50, SecondSpace::Identity, 1).unwrap();
        assert_eq!(data.phi(), data.phi_prime());
    }

    #[test]
    fn same_seed_same_data() {
        let spec = GaussianMixtureSpec::new(vec![0.0, 1.0], vec![1.0, 0.0], 0.5, 0.3).unwrap();
        let second = SecondSpace::RandomProjection { dims: 3 };
        let a = synth_gaussian(&spec, 200, second, 42).unwrap();
        let b = synth_gaussian(&spec, 200, second, 42).unwrap();
        assert_eq!(a, b);
        let c = synth_gaussian(&spec, 200, second, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn projection_dims_and_norms() {
        let spec = GaussianMixtureSpec::symmetric(vec![1.0, 0.0], 1.0).unwrap();
        let data = synth_gaussian(&spec, 20, SecondSpace::RandomProjection { dims: 2 }, 5).unwrap();
        assert_eq!(data.phi_prime().dims(), 2);
        // A square orthogonal map preserves norms.
        for i in 0..20 {
            let a: f64 = data.phi().row(i).iter().map(|v| v * v).sum();
            let b: f64 = data.phi_prime().row(i).iter().map(|v| v * v).sum();
            assert!((a - b).abs() < 1e-9 * (1.0 + a));
        }
        let data = synth_gaussian(&spec, 5, SecondSpace::RandomProjection { dims: 1 }, 5).unwrap();
        assert_eq!(data.phi_prime().dims(), 1);
    }

    #[test]
    fn squared_space() {
        let spec = GaussianMixtureSpec::symmetric(vec![1.0], 1.0).unwrap();
        let data = synth_gaussian(&spec, 10, SecondSpace::SquaredAppended, 2).unwrap();
        assert_eq!(data.phi_prime().dims(), 2);
        for i in 0..10 {
            let x = data.phi().row(i)[0];
            assert_eq!(data.phi_prime().row(i), &[x, x * x]);
        }
    }

    #[test]
    fn tiny_sigma_separates_classes() {
        let spec = GaussianMixtureSpec::symmetric(vec![1.0], 1e-6).unwrap();
        let data = synth_gaussian(&spec, 100, SecondSpace::Identity, 3).unwrap();
        for (row, y) in data.phi().iter_rows().zip(data.labels()) {
            assert_eq!(row[0] > 0.0, *y == Label::Positive);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(GaussianMixtureSpec::new(vec![1.0], vec![1.0, 2.0], 1.0, 0.5).is_err());
        assert!(GaussianMixtureSpec::new(vec![1.0], vec![1.0], 0.0, 0.5).is_err());
        assert!(GaussianMixtureSpec::new(vec![1.0], vec![1.0], 1.0, 1.0).is_err());
        assert!(GaussianMixtureSpec::new(vec![], vec![], 1.0, 0.5).is_err());
    }
}

#![allow(dead_code)]

use lwr::{Dataset, FeatureMatrix, Label, LwrHyperparams, RejectionCost};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn hyper(c: f64, lambda: f64, lambda_prime: f64) -> LwrHyperparams {
    LwrHyperparams::new(RejectionCost::new(c).unwrap(), lambda, lambda_prime).unwrap()
}

pub fn dataset(labels: Vec<Label>, d: usize, phi: Vec<f64>, dp: usize, phi_prime: Vec<f64>) -> Dataset {
    let ids: Vec<String> = (0..labels.len()).map(|i| format!("x{i}")).collect();
    Dataset::new(
        labels,
        FeatureMatrix::new(ids.clone(), d, phi).unwrap(),
        FeatureMatrix::new(ids, dp, phi_prime).unwrap(),
    )
    .unwrap()
}

/// Random instance with `m` samples, `d` + `dp` features and both labels.
pub fn random_instance(rng: &mut ChaCha8Rng, m: usize, d: usize, dp: usize) -> Dataset {
    let mut labels: Vec<Label> = (0..m)
        .map(|_| if rng.random::<bool>() { Label::Positive } else { Label::Negative })
        .collect();
    labels[0] = Label::Positive;
    labels[1] = Label::Negative;
    let shift = |l: Label| if l == Label::Positive { 0.7 } else { -0.7 };
    let phi = labels
        .iter()
        .flat_map(|&l| (0..d).map(move |_| shift(l)).collect::<Vec<_>>())
        .map(|v| v + rng.random_range(-1.5..1.5))
        .collect();
    let phi_prime = (0..m * dp).map(|_| rng.random_range(-2.0..2.0)).collect();
    dataset(labels, d, phi, dp, phi_prime)
}

pub fn random_hyper(rng: &mut ChaCha8Rng) -> LwrHyperparams {
    let c = rng.random_range(0.05..0.45);
    let lambda = 10f64.powf(rng.random_range(-2.0..1.0));
    let lambda_prime = 10f64.powf(rng.random_range(-2.0..1.0));
    hyper(c, lambda, lambda_prime)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

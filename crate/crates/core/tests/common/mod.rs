#![allow(dead_code)]

use contreg_core::{Matrix, RegressionTask, Vector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    Vector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Matrix {
    Matrix::from_fn(n, d, |_, _| rng.sample(StandardNormal))
}

/// Gaussian task with generic (not necessarily realizable) targets.
pub fn random_task(rng: &mut ChaCha8Rng, n: usize, d: usize) -> RegressionTask {
    let x = gaussian_matrix(rng, n, d);
    let y = gaussian_vector(rng, n);
    RegressionTask::new(x, y).unwrap()
}

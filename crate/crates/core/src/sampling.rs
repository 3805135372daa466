//! Seeded randomness. Every consumer derives its own ChaCha stream from the
//! run seed so results do not depend on scheduling.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

/// Stream `stream` of the generator seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_vector(dim: usize, rng: &mut SeededRng) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn inner(g: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let d = x.len();
    let mut s = 0.0;
    for i in 0..d {
        let mut row = 0.0;
        for j in 0..d {
            row += g[(i, j)] * y[j];
        }
        s += x[i] * row;
    }
    s
}

pub fn norm(g: &DMatrix<f64>, x: &[f64]) -> f64 {
    inner(g, x, x).max(0.0).sqrt()
}

/// Gaussian direction normalized in the `g` inner product.
pub fn random_unit_vector(g: &DMatrix<f64>, rng: &mut SeededRng) -> Vec<f64> {
    loop {
        let v = gaussian_vector(g.nrows(), rng);
        let n = norm(g, &v);
        if n > 1e-8 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform point in `center ± half_width`.
pub fn uniform_in_box(center: &[f64], half_width: &[f64], rng: &mut SeededRng) -> Vec<f64> {
    center
        .iter()
        .zip(half_width)
        .map(|(&c, &h)| c + h * rng.random_range(-1.0..=1.0))
        .collect()
}

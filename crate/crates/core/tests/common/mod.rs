#![allow(dead_code)]

use entwitness::operator::ComplexMatrix;
use entwitness::{DensityMatrix, HermitianOperator};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed seed for every randomized integration check. Streams are derived from it
/// so that adding a check never perturbs the draws of another.
pub const SEED: u64 = 20_240_917;

pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED.wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianOperator {
    let a = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    HermitianOperator::new((&a + a.adjoint()).scale(0.5)).unwrap()
}

pub fn density(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> DensityMatrix {
    let weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(n, n);
    for w in weights {
        let v = unit_vector(rng, n);
        m += HermitianOperator::projector(&v).matrix().scale(w / total);
    }
    DensityMatrix::from_matrix(m).unwrap()
}

/// `[N(2^(N-1) - 1) + sqrt(N^2 (2^(N-1) - 1)^2 + 2^(N+1) N (3N - 2))] / (2^N (3N - 2))`.
pub fn w_state_threshold(n: usize) -> f64 {
    let n_f = n as f64;
    let a = 2f64.powi(n as i32 - 1) - 1.0;
    let disc = n_f * n_f * a * a + 2f64.powi(n as i32 + 1) * n_f * (3.0 * n_f - 2.0);
    (n_f * a + disc.sqrt()) / (2f64.powi(n as i32) * (3.0 * n_f - 2.0))
}

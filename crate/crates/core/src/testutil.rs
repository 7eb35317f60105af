//! Seeded random fixtures shared by unit tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measures::DensityMatrix;
use crate::operator::{ComplexMatrix, HermitianOperator};

pub const SEED: u64 = 0x5eed_2024;

pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
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

/// Random mixed state of the given rank, built as a weighted sum of random projectors.
pub fn density(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> DensityMatrix {
    let weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(n, n);
    for w in weights {
        let v = unit_vector(rng, n);
        m += HermitianOperator::projector(&v).matrix().scale(w / total);
    }
    DensityMatrix::new(HermitianOperator::new(m).unwrap()).unwrap()
}

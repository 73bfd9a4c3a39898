//! Seeded random sampling used by every randomized check.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matkernel::Matrix;
use crate::scalar::{Real, C};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian entry (independent real and imaginary parts).
pub fn gaussian<T: Real>(rng: &mut Rng) -> C<T> {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    Complex::new(T::lit(a), T::lit(b))
}

pub fn gaussian_vec<T: Real>(rng: &mut Rng, n: usize) -> Vec<C<T>> {
    (0..n).map(|_| gaussian(rng)).collect()
}

pub fn gaussian_matrix<T: Real>(rng: &mut Rng, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Uniform real number in `[lo, hi)`.
pub fn uniform<T: Real>(rng: &mut Rng, lo: f64, hi: f64) -> T {
    use rand::RngExt;
    T::lit(rng.random_range(lo..hi))
}

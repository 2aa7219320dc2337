//! Reproducible random tuples.
//!
//! Every draw comes from a ChaCha8 generator keyed by `(seed, tag, index)`:
//! the seed and index form the key, the purpose tag selects the stream. Work
//! split across threads by index therefore sees the same numbers regardless
//! of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use num_complex::Complex64;

use crate::ncpoly::{CMatrix, MatrixTuple};

/// Purpose tags separating independent random streams.
pub mod tags {
    pub const TUPLE: u64 = 1;
    pub const ROW_CONTRACTION: u64 = 2;
    pub const CERTIFY: u64 = 3;
    pub const KERNEL_SAMPLES: u64 = 4;
    pub const KERNEL_RECERTIFY: u64 = 5;
    pub const SAMPLE_IN: u64 = 6;
    pub const TEST: u64 = 99;
}

pub fn seeded_rng(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(tag);
    rng
}

/// Complex Gaussian with `E|z|^2 = std^2`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, std: f64) -> Complex64 {
    let s = std * std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    std: f64,
) -> CMatrix {
    // fill row-major so the draw order matches the JSON layout
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng, std);
        }
    }
    m
}

/// `d` independent `n x n` matrices with complex Gaussian entries of standard
/// deviation `scale / sqrt(n)`.
pub fn random_tuple_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d: usize,
    scale: f64,
) -> MatrixTuple {
    let std = scale / (n as f64).sqrt();
    let mats = (0..d).map(|_| gaussian_matrix(rng, n, n, std)).collect();
    MatrixTuple::new(mats).expect("n, d >= 1")
}

pub fn random_tuple(n: usize, d: usize, scale: f64, seed: u64) -> MatrixTuple {
    assert!(n >= 1 && d >= 1, "random_tuple needs n, d >= 1");
    random_tuple_with(&mut seeded_rng(seed, tags::TUPLE, 0), n, d, scale)
}

/// Gaussian tuple rescaled so its row norm is `radius`.
pub fn tuple_with_row_norm<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d: usize,
    radius: f64,
) -> MatrixTuple {
    loop {
        let x = random_tuple_with(rng, n, d, 1.0);
        let norm = x.row_norm();
        if norm > 0.0 {
            return x.scaled(radius / norm);
        }
    }
}

/// A random tuple with row norm exactly `1 - margin`.
pub fn random_row_contraction(n: usize, d: usize, margin: f64, seed: u64) -> MatrixTuple {
    assert!(margin > 0.0 && margin < 1.0, "margin must lie in (0, 1)");
    let mut rng = seeded_rng(seed, tags::ROW_CONTRACTION, 0);
    tuple_with_row_norm(&mut rng, n, d, 1.0 - margin)
}

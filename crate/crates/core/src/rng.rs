//! Seeded random draws. All generators are `ChaCha8Rng` seeded from a `u64`,
//! which is stable across platforms and releases.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(len, |_, _| StandardNormal.sample(rng))
}

/// Row-major fill, so the draw order does not depend on storage layout.
pub fn normal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    let data: Vec<f64> = (0..rows * cols).map(|_| StandardNormal.sample(rng)).collect();
    DMatrix::from_row_slice(rows, cols, &data)
}

/// Uniformly distributed unit vector; the zero vector when `len == 0`.
pub fn unit_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> DVector<f64> {
    if len == 0 {
        return DVector::zeros(0);
    }
    loop {
        let v = normal_vector(len, rng);
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// `n×k` matrix with orthonormal columns, Haar-distributed.
pub fn random_orthonormal<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> DMatrix<f64> {
    assert!(k <= n, "cannot fit {k} orthonormal columns in dimension {n}");
    if k == 0 {
        return DMatrix::zeros(n, 0);
    }
    let g = normal_matrix(n, k, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn random_orthogonal<R: Rng + ?Sized>(k: usize, rng: &mut R) -> DMatrix<f64> {
    random_orthonormal(k, k, rng)
}

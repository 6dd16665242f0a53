//! Seeded sample streams and random generators for the fuzz suites.
//!
//! Sample `i` of a run with master seed `s` always uses `stream(s, i)`, a
//! ChaCha8 generator keyed by `s` on stream `i`. Parallel evaluation therefore
//! reproduces sequential results exactly.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::exterior::{binomial, KForm};

pub type SampleRng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn normal_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| normal(rng)).collect()
}

/// Form with i.i.d. standard normal coefficients.
pub fn random_form<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: usize) -> KForm {
    let coeffs = normal_vec(rng, binomial(dim, degree));
    KForm::new(dim, degree, coeffs).expect("dimension within range")
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| normal(rng))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let qr = random_matrix(rng, dim, dim).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `AᵀA + 0.1·I` with Gaussian `A`, rescaled to determinant one.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let a = random_matrix(rng, dim, dim);
    let g = a.transpose() * &a + DMatrix::identity(dim, dim) * 0.1;
    let det = g.determinant();
    g / det.powf(1.0 / dim as f64)
}

/// Random 2x2 basis (columns) with determinant one.
///
/// Gaussian columns are redrawn while the sine of the angle between them is
/// below `0.05`, which keeps enumeration well conditioned.
pub fn random_basis_2d<R: Rng + ?Sized>(rng: &mut R) -> DMatrix<f64> {
    loop {
        let b = random_matrix(rng, 2, 2);
        let det = b.determinant();
        let c0 = b.column(0).norm();
        let c1 = b.column(1).norm();
        if c0 == 0.0 || c1 == 0.0 || det.abs() / (c0 * c1) < 0.05 {
            continue;
        }
        let mut b = b / det.abs().sqrt();
        if det < 0.0 {
            b.column_mut(1).neg_mut();
        }
        return b;
    }
}

/// Random integer unimodular matrix: a product of elementary shears and swaps.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, dim: usize, steps: usize) -> DMatrix<i64> {
    let mut u = DMatrix::<i64>::identity(dim, dim);
    if dim < 2 {
        return u;
    }
    for _ in 0..steps {
        let i = rng.random_range(0..dim);
        let mut j = rng.random_range(0..dim - 1);
        if j >= i {
            j += 1;
        }
        match rng.random_range(0..3) {
            0 => u.swap_columns(i, j),
            _ => {
                let k: i64 = if rng.random_bool(0.5) { 1 } else { -1 };
                let col_j = u.column(j).clone_owned();
                let mut col_i = u.column_mut(i);
                col_i += col_j * k;
            }
        }
    }
    u
}

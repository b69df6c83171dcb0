//! Seeded random SPD/symmetric generators and eigensolver-free oracles.

#![allow(dead_code)]

use leukocov_core::linalg::Matrix;
use leukocov_core::spdgeom::spd_exp;
use leukocov_core::{SpdMatrix, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_sym(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SymMatrix {
    let a = Matrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0) * scale);
    SymMatrix::symmetrize(&a)
}

/// `exp(S)` with entries of `S` in `[-scale, scale]`: eigenvalues stay within
/// `exp(±n·scale)`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SpdMatrix {
    spd_exp(&random_sym(rng, n, scale))
}

/// Random matrix with singular values bounded away from zero.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let a = Matrix::from_fn(n, |_, _| rng.random_range(-0.5..0.5));
    a.add(&Matrix::identity(n).scale(n as f64 * 0.5 + 0.5))
}

pub fn rel_frobenius(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).frobenius_norm() / b.frobenius_norm().max(1.0)
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn gauss_jordan_inverse(m: &Matrix) -> Matrix {
    let n = m.n();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for k in 0..n {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                for k in 0..n {
                    a[r][k] -= f * a[col][k];
                    inv[r][k] -= f * inv[col][k];
                }
            }
        }
    }
    Matrix::from_fn(n, |i, j| inv[i][j])
}

/// Principal square root by the Denman–Beavers iteration; valid for any
/// matrix with positive real spectrum.
pub fn denman_beavers_sqrt(a: &Matrix) -> Matrix {
    let n = a.n();
    let mut y = a.clone();
    let mut z = Matrix::identity(n);
    for _ in 0..100 {
        let y_next = y.add(&gauss_jordan_inverse(&z)).scale(0.5);
        let z_next = z.add(&gauss_jordan_inverse(&y)).scale(0.5);
        let done = y_next.sub(&y).frobenius_norm() <= 1e-15 * y_next.frobenius_norm();
        y = y_next;
        z = z_next;
        if done {
            break;
        }
    }
    y
}

/// Geodesic midpoint `P₁ (P₁⁻¹ P₂)^{1/2}`, the two-point Fréchet mean.
pub fn geodesic_midpoint(p1: &SpdMatrix, p2: &SpdMatrix) -> Matrix {
    let p1inv = gauss_jordan_inverse(p1.matrix());
    p1.matrix().matmul(&denman_beavers_sqrt(&p1inv.matmul(p2.matrix())))
}

//! Small dense square matrices and the two factorizations the crate needs:
//! a cyclic Jacobi symmetric eigensolver and a Cholesky solver.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::math;
use crate::{Error, Result};

/// Row-major dense `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix) -> Self {
        assert_eq!(self.n, rhs.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len(), "matvec dimension mismatch");
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Self {
        assert_eq!(self.n, rhs.n, "add dimension mismatch");
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Self {
        assert_eq!(self.n, rhs.n, "sub dimension mismatch");
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| a * alpha).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|a| a * a).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.n, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    /// Relative symmetry check: `|a_ij - a_ji| <= tol * max(1, |a_ij|)`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let a = self[(i, j)];
                let b = self[(j, i)];
                if !a.is_finite() || !b.is_finite() {
                    return false;
                }
                if (a - b).abs() > tol * a.abs().max(1.0) {
                    return false;
                }
            }
        }
        self.data.iter().all(|v| v.is_finite())
    }

    /// `Wᵀ · self · W`.
    pub fn congruence(&self, w: &Matrix) -> Self {
        w.transpose().matmul(self).matmul(w)
    }

    /// `U · diag(values) · Uᵀ`, assembled symmetric.
    pub fn from_eigen(u: &Matrix, values: &[f64]) -> Self {
        let n = u.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for (k, &v) in values.iter().enumerate() {
                    s += u[(i, k)] * v * u[(j, k)];
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// the columns of the second matrix. Each eigenvector is signed so that its
/// largest-magnitude entry (first one on ties) is positive. Only the upper
/// triangle of the input is trusted.
pub fn jacobi_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.n();
    let mut a = Matrix::from_fn(n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] });
    let mut v = Matrix::identity(n);

    for sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].abs();
            }
        }
        if off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // Once an off-diagonal entry no longer changes either diagonal
                // entry in floating point it is dropped outright.
                let g = 100.0 * apq.abs();
                let (app, aqq) = (a[(p, p)].abs(), a[(q, q)].abs());
                if sweep > 3 && app + g == app && aqq + g == aqq {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + math::sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        let mut pivot = 0;
        for k in 0..n {
            if v[(k, src)].abs() > v[(pivot, src)].abs() {
                pivot = k;
            }
        }
        let sign = if v[(pivot, src)] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            vectors[(k, col)] = sign * v[(k, src)];
        }
    }
    (values, vectors)
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
///
/// Returns `None` when a pivot drops below `rel_tol` times the largest
/// diagonal entry.
pub fn cholesky(m: &Matrix, rel_tol: f64) -> Option<Matrix> {
    let n = m.n();
    let max_diag = (0..n).fold(0.0f64, |acc, i| acc.max(m[(i, i)]));
    if max_diag <= 0.0 || !max_diag.is_finite() {
        return None;
    }
    let floor = rel_tol * max_diag;
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= floor || !d.is_finite() {
            return None;
        }
        let d = math::sqrt(d);
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the Cholesky factor `L`.
pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.n();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(n: usize, seed: u64) -> Matrix {
        let mut state = seed;
        Matrix::from_fn(n, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        for seed in 0..20 {
            let a = lcg_matrix(7, seed).symmetrized();
            let (vals, u) = jacobi_eigen(&a);
            let utu = u.transpose().matmul(&u);
            assert!(utu.sub(&Matrix::identity(7)).max_abs() < 1e-12);
            let back = Matrix::from_eigen(&u, &vals);
            assert!(back.sub(&a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn jacobi_diagonal_input() {
        let (vals, u) = jacobi_eigen(&Matrix::from_diag(&[1.0, 4.0]));
        assert_eq!(vals, [4.0, 1.0]);
        assert_eq!(u, Matrix::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap());
    }

    #[test]
    fn eigenvector_sign_convention() {
        let a = lcg_matrix(5, 3).symmetrized();
        let (_, u) = jacobi_eigen(&a);
        for c in 0..5 {
            let mut best = 0;
            for k in 0..5 {
                if u[(k, c)].abs() > u[(best, c)].abs() {
                    best = k;
                }
            }
            assert!(u[(best, c)] > 0.0);
        }
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let b = lcg_matrix(6, 9);
        let a = b.transpose().matmul(&b).add(&Matrix::identity(6));
        let l = cholesky(&a, 1e-12).unwrap();
        let rhs = [1.0, -2.0, 0.5, 3.0, 0.0, 1.5];
        let x = cholesky_solve(&l, &rhs);
        let ax = a.matvec(&x);
        for (u, v) in ax.iter().zip(&rhs) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_singular() {
        let a = Matrix::from_row_major(2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(cholesky(&a, 1e-12).is_none());
    }
}

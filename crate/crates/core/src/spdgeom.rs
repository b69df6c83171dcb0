//! Affine-invariant Riemannian geometry on symmetric positive-definite
//! matrices.
//!
//! Every matrix function goes through the symmetric eigendecomposition
//! `P = U diag(σ) Uᵀ`: `exp`, `log` and the powers `P^{±1/2}` apply the scalar
//! function to `σ`. Products of the form `P^{-1/2} Q P^{-1/2}` are
//! symmetrized before they are decomposed.
//!
//! With `⟨S₁, S₂⟩_P = tr(S₁ P⁻¹ S₂ P⁻¹)` the geodesic distance is
//! `δ(P, Q) = ‖log(P^{-1/2} Q P^{-1/2})‖_F`, and the tangent coordinates
//! produced by [`tangent_coords`] are an isometric flattening of the tangent
//! space at `P`: `‖tangent_coords(P, Q)‖₂ = δ(P, Q)`.

use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use crate::linalg::{jacobi_eigen, Matrix};
use crate::math;
use crate::{Error, Result};

/// Relative tolerance of the symmetry invariant.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues at or below this are rejected by `log`, `P^{-1/2}` and `P⁻¹`.
pub const MIN_EIGENVALUE: f64 = 1e-12;

/// A real symmetric matrix (a tangent vector of the SPD manifold).
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

/// A symmetric positive-definite matrix (a point of the SPD manifold).
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix(Matrix);

/// `upper`-vectorized symmetric matrix of length `n(n+1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(Vec<f64>);

/// Symmetric eigendecomposition with eigenvalues in descending order and
/// eigenvectors as the columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub vectors: Matrix,
    pub values: Vec<f64>,
}

impl EigenPair {
    pub fn reconstruct(&self) -> Matrix {
        Matrix::from_eigen(&self.vectors, &self.values)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        Matrix::from_eigen(&self.vectors, &values)
    }

    fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::INFINITY)
    }
}

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::NonSymmetric);
        }
        Ok(Self(m))
    }

    /// Takes `(A + Aᵀ)/2`.
    pub fn symmetrize(m: &Matrix) -> Self {
        Self(m.symmetrized())
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self(Matrix::from_diag(diag))
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self(self.0.scale(alpha))
    }

    pub fn eig(&self) -> EigenPair {
        let (values, vectors) = jacobi_eigen(&self.0);
        EigenPair { vectors, values }
    }
}

impl SpdMatrix {
    /// Validates symmetry and strict positive-definiteness.
    pub fn new(m: Matrix) -> Result<Self> {
        let sym = SymMatrix::new(m)?;
        let min = sym.eig().min_value();
        if !(min > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
        }
        Ok(Self(sym.0))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diag(diag))
    }

    /// Wraps a matrix known to be SPD by construction.
    pub(crate) fn new_unchecked(m: Matrix) -> Self {
        Self(m)
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn as_sym(&self) -> SymMatrix {
        SymMatrix(self.0.clone())
    }

    pub fn eig(&self) -> EigenPair {
        let (values, vectors) = jacobi_eigen(&self.0);
        EigenPair { vectors, values }
    }

    fn checked_eig(&self) -> Result<EigenPair> {
        let e = self.eig();
        let min = e.min_value();
        if !(min > MIN_EIGENVALUE) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
        }
        Ok(e)
    }

    pub fn inverse(&self) -> Result<SpdMatrix> {
        Ok(Self(self.checked_eig()?.map(|v| 1.0 / v)))
    }

    /// `P^t` for real `t`.
    pub fn powf(&self, t: f64) -> Result<SpdMatrix> {
        Ok(Self(self.checked_eig()?.map(|v| math::pow(v, t))))
    }

    /// `Wᵀ P W`; fails if `W` is singular enough to break definiteness.
    pub fn congruence(&self, w: &Matrix) -> Result<SpdMatrix> {
        SpdMatrix::new(self.0.congruence(w).symmetrized())
    }
}

impl AsRef<Matrix> for SymMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

impl AsRef<Matrix> for SpdMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

impl TangentVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm2(&self.0)
    }
}

/// Length of the tangent vector for `n × n` matrices.
pub const fn tangent_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Symmetric eigendecomposition of an arbitrary matrix, rejecting
/// asymmetric input.
pub fn sym_eig(m: &Matrix) -> Result<EigenPair> {
    Ok(SymMatrix::new(m.clone())?.eig())
}

/// Matrix exponential of a symmetric matrix.
pub fn spd_exp(s: &SymMatrix) -> SpdMatrix {
    SpdMatrix(s.eig().map(math::exp))
}

/// Principal matrix logarithm of an SPD matrix.
pub fn spd_log(p: &SpdMatrix) -> Result<SymMatrix> {
    Ok(SymMatrix(p.checked_eig()?.map(math::ln)))
}

/// `P^{1/2}` and `P^{-1/2}` from a single decomposition.
#[derive(Debug, Clone)]
struct Roots {
    sqrt: Matrix,
    inv_sqrt: Matrix,
}

impl Roots {
    fn of(p: &SpdMatrix) -> Result<Self> {
        let e = p.checked_eig()?;
        Ok(Self {
            sqrt: e.map(math::sqrt),
            inv_sqrt: e.map(|v| 1.0 / math::sqrt(v)),
        })
    }

    /// `P^{-1/2} Q P^{-1/2}`, symmetrized.
    fn whiten(&self, q: &Matrix) -> SymMatrix {
        SymMatrix::symmetrize(&self.inv_sqrt.matmul(q).matmul(&self.inv_sqrt))
    }

    /// `P^{1/2} S P^{1/2}`, symmetrized.
    fn color(&self, s: &Matrix) -> Matrix {
        self.sqrt.matmul(s).matmul(&self.sqrt).symmetrized()
    }
}

fn check_same_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// `tr(S₁ P⁻¹ S₂ P⁻¹)`.
pub fn metric_inner(s1: &SymMatrix, s2: &SymMatrix, p: &SpdMatrix) -> Result<f64> {
    check_same_n(p.n(), s1.n())?;
    check_same_n(p.n(), s2.n())?;
    let pinv = p.inverse()?;
    let a = s1.0.matmul(&pinv.0);
    let b = s2.0.matmul(&pinv.0);
    let n = p.n();
    let mut tr = 0.0;
    for i in 0..n {
        for k in 0..n {
            tr += a[(i, k)] * b[(k, i)];
        }
    }
    Ok(tr)
}

/// `‖S‖_P = sqrt(⟨S, S⟩_P)`.
pub fn metric_norm(s: &SymMatrix, p: &SpdMatrix) -> Result<f64> {
    Ok(math::sqrt(metric_inner(s, s, p)?.max(0.0)))
}

/// Geodesic distance `sqrt(Σ ln² λᵢ)` over the eigenvalues of `P₁⁻¹ P₂`,
/// evaluated on the congruent SPD matrix `P₁^{-1/2} P₂ P₁^{-1/2}`.
pub fn riemann_distance(p1: &SpdMatrix, p2: &SpdMatrix) -> Result<f64> {
    check_same_n(p1.n(), p2.n())?;
    let roots = Roots::of(p1)?;
    distance_whitened(&roots, p2)
}

fn distance_whitened(roots: &Roots, q: &SpdMatrix) -> Result<f64> {
    let e = roots.whiten(&q.0).eig();
    let min = e.min_value();
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(math::sqrt(e.values.iter().map(|&l| math::ln(l) * math::ln(l)).sum()))
}

/// `Exp_P(S) = P^{1/2} exp(P^{-1/2} S P^{-1/2}) P^{1/2}`.
pub fn exp_map(p: &SpdMatrix, s: &SymMatrix) -> Result<SpdMatrix> {
    check_same_n(p.n(), s.n())?;
    let roots = Roots::of(p)?;
    let inner = spd_exp(&roots.whiten(&s.0));
    Ok(SpdMatrix(roots.color(&inner.0)))
}

/// `Log_P(Q) = P^{1/2} log(P^{-1/2} Q P^{-1/2}) P^{1/2}`.
pub fn log_map(p: &SpdMatrix, q: &SpdMatrix) -> Result<SymMatrix> {
    check_same_n(p.n(), q.n())?;
    let roots = Roots::of(p)?;
    let inner = spd_log(&SpdMatrix(roots.whiten(&q.0).0))?;
    Ok(SymMatrix(roots.color(&inner.0)))
}

/// Row-major upper triangle, off-diagonal entries weighted by √2, so that
/// `‖upper_vec(S)‖₂ = ‖S‖_F`.
pub fn upper_vec(s: &SymMatrix) -> TangentVector {
    let n = s.n();
    let mut out = Vec::with_capacity(tangent_dim(n));
    for i in 0..n {
        out.push(s.0[(i, i)]);
        for j in (i + 1)..n {
            out.push(SQRT_2 * s.0[(i, j)]);
        }
    }
    TangentVector(out)
}

/// Inverse of [`upper_vec`].
pub fn unupper_vec(v: &TangentVector, n: usize) -> Result<SymMatrix> {
    if v.len() != tangent_dim(n) {
        return Err(Error::LengthMismatch { len: v.len(), n });
    }
    let mut m = Matrix::zeros(n);
    let mut it = v.0.iter();
    for i in 0..n {
        m[(i, i)] = *it.next().expect("length checked");
        for j in (i + 1)..n {
            let x = it.next().expect("length checked") / SQRT_2;
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    Ok(SymMatrix(m))
}

/// Normalized tangent coordinates `upper(log(P^{-1/2} Q P^{-1/2}))`.
pub fn tangent_coords(p: &SpdMatrix, q: &SpdMatrix) -> Result<TangentVector> {
    TangentSpace::at(p)?.coords(q)
}

/// The tangent space at a fixed base point, with `P^{-1/2}` cached so that
/// many matrices can be flattened against the same reference.
#[derive(Debug, Clone)]
pub struct TangentSpace {
    base: SpdMatrix,
    roots: Roots,
}

/// Equal when the base points are equal; the roots are derived from it.
impl PartialEq for TangentSpace {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl TangentSpace {
    pub fn at(base: &SpdMatrix) -> Result<Self> {
        Ok(Self {
            base: base.clone(),
            roots: Roots::of(base)?,
        })
    }

    pub fn base(&self) -> &SpdMatrix {
        &self.base
    }

    pub fn coords(&self, q: &SpdMatrix) -> Result<TangentVector> {
        check_same_n(self.base.n(), q.n())?;
        let whitened = SpdMatrix(self.roots.whiten(&q.0).0);
        Ok(upper_vec(&spd_log(&whitened)?))
    }
}

/// Arithmetic mean `(1/l) Σ Pᵢ`.
pub fn euclidean_mean<M: AsRef<Matrix>>(items: &[M]) -> Result<SymMatrix> {
    let first = items.first().ok_or(Error::EmptyInput)?.as_ref();
    let n = first.n();
    let mut acc = Matrix::zeros(n);
    for m in items {
        let m = m.as_ref();
        check_same_n(n, m.n())?;
        acc = acc.add(m);
    }
    Ok(SymMatrix::symmetrize(&acc.scale(1.0 / items.len() as f64)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanParams {
    /// Threshold on `‖Σₖ log(Pₖ⁻¹ M)‖_F`.
    pub eps: f64,
    pub max_iters: usize,
}

impl Default for MeanParams {
    fn default() -> Self {
        Self {
            eps: 1e-8,
            max_iters: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanResult {
    pub mean: SpdMatrix,
    /// Fixed-point updates applied.
    pub iterations: usize,
    pub converged: bool,
    /// Stopping statistic at every visited iterate, the returned one last.
    pub statistics: Vec<f64>,
}

/// Fréchet (Karcher) mean under the affine-invariant metric.
///
/// Starts from the arithmetic mean and iterates
/// `M ← M^{1/2} exp((1/K) Σₖ log(M^{-1/2} Pₖ M^{-1/2})) M^{1/2}`
/// until `‖Σₖ log(Pₖ⁻¹ M)‖_F ≤ eps` or `max_iters` updates have been made.
/// Running out of iterations is reported through `converged`, not an error.
pub fn riemannian_mean(items: &[SpdMatrix], params: MeanParams) -> Result<MeanResult> {
    if !(params.eps > 0.0) {
        return Err(Error::InvalidParameter("mean eps must be positive"));
    }
    let k = items.len() as f64;
    let mut mean = SpdMatrix(euclidean_mean(items)?.0);
    let mut statistics = Vec::new();
    let mut iterations = 0;
    loop {
        let roots = Roots::of(&mean)?;
        let n = mean.n();
        let mut sum = Matrix::zeros(n);
        for p in items {
            let whitened = SpdMatrix(roots.whiten(&p.0).0);
            sum = sum.add(&spd_log(&whitened)?.0);
        }
        // Σ log(Pₖ⁻¹ M) = −M^{-1/2} (Σ log(M^{-1/2} Pₖ M^{-1/2})) M^{1/2}
        let statistic = roots.inv_sqrt.matmul(&sum).matmul(&roots.sqrt).frobenius_norm();
        statistics.push(statistic);
        if statistic <= params.eps {
            return Ok(MeanResult {
                mean,
                iterations,
                converged: true,
                statistics,
            });
        }
        if iterations == params.max_iters {
            return Ok(MeanResult {
                mean,
                iterations,
                converged: false,
                statistics,
            });
        }
        let step = spd_exp(&SymMatrix::symmetrize(&sum.scale(1.0 / k)));
        mean = SpdMatrix(roots.color(&step.0));
        iterations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::{E, LN_2};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diag(d).unwrap()
    }

    #[test]
    fn eig_fixtures() {
        let e = sym_eig(&Matrix::identity(3)).unwrap();
        assert_eq!(e.values, [1.0, 1.0, 1.0]);
        assert!(e.reconstruct().sub(&Matrix::identity(3)).max_abs() < 1e-15);

        let e = sym_eig(&Matrix::from_diag(&[4.0, 1.0])).unwrap();
        assert_eq!(e.values, [4.0, 1.0]);
        assert_eq!(e.vectors, Matrix::identity(2));

        let bad = Matrix::from_row_major(2, vec![1.0, 2.0, 3.0, 1.0]).unwrap();
        assert_eq!(sym_eig(&bad), Err(Error::NonSymmetric));
    }

    #[test]
    fn exp_log_fixtures() {
        assert_eq!(spd_exp(&SymMatrix::zeros(3)).matrix(), &Matrix::identity(3));
        let e = spd_exp(&SymMatrix::from_diag(&[LN_2, 3f64.ln()]));
        assert!(e.matrix().sub(&Matrix::from_diag(&[2.0, 3.0])).max_abs() < 1e-14);

        assert!(spd_log(&SpdMatrix::identity(4)).unwrap().matrix().max_abs() < 1e-15);
        let l = spd_log(&diag(&[E * E, 1.0])).unwrap();
        assert!(l.matrix().sub(&Matrix::from_diag(&[2.0, 0.0])).max_abs() < 1e-14);
    }

    #[test]
    fn log_rejects_near_singular() {
        let p = SpdMatrix::new_unchecked(Matrix::from_diag(&[1.0, 1e-13]));
        assert!(matches!(spd_log(&p), Err(Error::NotPositiveDefinite { .. })));
        assert!(matches!(
            SpdMatrix::from_diag(&[1.0, 0.0]),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn metric_fixtures() {
        let s = SymMatrix::new(Matrix::from_row_major(2, vec![1.0, 2.0, 2.0, -3.0]).unwrap()).unwrap();
        let ip = metric_inner(&s, &s, &SpdMatrix::identity(2)).unwrap();
        assert!(close(ip, s.matrix().frobenius_norm().powi(2), 1e-12));

        let id = SymMatrix::from_diag(&[1.0, 1.0]);
        assert!(close(metric_inner(&id, &id, &diag(&[2.0, 2.0])).unwrap(), 0.5, 1e-15));

        let p = diag(&[2.0, 5.0]);
        let a = metric_inner(&s.scale(3.0), &id, &p).unwrap();
        assert!(close(a, 3.0 * metric_inner(&s, &id, &p).unwrap(), 1e-12));
        assert!(close(
            metric_inner(&s, &id, &p).unwrap(),
            metric_inner(&id, &s, &p).unwrap(),
            1e-14
        ));
    }

    #[test]
    fn distance_fixtures() {
        let p = diag(&[3.0, 0.5, 7.0]);
        assert!(riemann_distance(&p, &p).unwrap() < 1e-14);
        let d = riemann_distance(&SpdMatrix::identity(3), &diag(&[E * E, 1.0, 1.0])).unwrap();
        assert!(close(d, 2.0, 1e-14));
        let d = riemann_distance(&diag(&[1.0, 4.0]), &diag(&[4.0, 1.0])).unwrap();
        assert!(close(d, SQRT_2 * 4f64.ln(), 1e-14));
        assert!(close(d, 1.9605162869, 1e-9));
    }

    #[test]
    fn maps_at_identity_and_zero() {
        let p = diag(&[2.0, 3.0]);
        let back = exp_map(&p, &SymMatrix::zeros(2)).unwrap();
        assert!(back.matrix().sub(p.matrix()).max_abs() < 1e-14);
        assert!(log_map(&p, &p).unwrap().matrix().max_abs() < 1e-14);

        let s = SymMatrix::new(Matrix::from_row_major(2, vec![0.3, -0.2, -0.2, 0.1]).unwrap()).unwrap();
        let a = exp_map(&SpdMatrix::identity(2), &s).unwrap();
        assert!(a.matrix().sub(spd_exp(&s).matrix()).max_abs() < 1e-14);
        let q = diag(&[5.0, 0.2]);
        let l = log_map(&SpdMatrix::identity(2), &q).unwrap();
        assert!(l.matrix().sub(spd_log(&q).unwrap().matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn upper_fixtures() {
        let s = SymMatrix::new(Matrix::from_row_major(2, vec![1.0, 2.0, 2.0, 3.0]).unwrap()).unwrap();
        let v = upper_vec(&s);
        assert_eq!(v.values(), [1.0, SQRT_2 * 2.0, 3.0]);
        assert_eq!(unupper_vec(&v, 2).unwrap(), s);
        let zero = upper_vec(&SymMatrix::zeros(4));
        assert_eq!(zero.values(), [0.0; 10]);
        assert_eq!(unupper_vec(&zero, 4).unwrap(), SymMatrix::zeros(4));
        assert_eq!(
            unupper_vec(&TangentVector::new(vec![0.0; 5]), 2),
            Err(Error::LengthMismatch { len: 5, n: 2 })
        );
    }

    #[test]
    fn tangent_coords_fixtures() {
        let p = diag(&[2.0, 0.5]);
        assert!(tangent_coords(&p, &p).unwrap().norm() < 1e-14);
        let q = diag(&[5.0, 0.2]);
        let t = tangent_coords(&SpdMatrix::identity(2), &q).unwrap();
        assert_eq!(t, upper_vec(&spd_log(&q).unwrap()));
    }

    #[test]
    fn euclidean_mean_fixtures() {
        let p = diag(&[2.0, 3.0]);
        assert_eq!(euclidean_mean(&[p.clone()]).unwrap().matrix(), p.matrix());
        let m = euclidean_mean(&[SpdMatrix::identity(2), diag(&[3.0, 3.0])]).unwrap();
        assert_eq!(m.matrix(), &Matrix::from_diag(&[2.0, 2.0]));
        assert_eq!(euclidean_mean::<SpdMatrix>(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn riemannian_mean_fixtures() {
        let p = diag(&[2.0, 3.0]);
        let r = riemannian_mean(&[p.clone()], MeanParams::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.converged);
        assert_eq!(r.mean, p);

        let r = riemannian_mean(&[diag(&[4.0, 0.5]), diag(&[0.25, 2.0])], MeanParams::default()).unwrap();
        assert!(r.converged);
        assert!(r.mean.matrix().sub(&Matrix::identity(2)).max_abs() < 1e-10);

        let r = riemannian_mean(&[diag(&[1.0, 4.0]), diag(&[4.0, 1.0])], MeanParams::default()).unwrap();
        assert!(r.mean.matrix().sub(&Matrix::from_diag(&[2.0, 2.0])).max_abs() < 1e-10);

        assert_eq!(riemannian_mean(&[], MeanParams::default()), Err(Error::EmptyInput));
    }

    #[test]
    fn riemannian_mean_flags_exhausted_iterations() {
        let skew = SpdMatrix::new(Matrix::from_row_major(2, vec![5.0, 4.0, 4.0, 5.0]).unwrap()).unwrap();
        let items = [diag(&[100.0, 0.01]), skew, diag(&[0.01, 3.0])];
        let r = riemannian_mean(
            &items,
            MeanParams {
                eps: 1e-300,
                max_iters: 2,
            },
        )
        .unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
        assert_eq!(r.statistics.len(), 3);
    }
}

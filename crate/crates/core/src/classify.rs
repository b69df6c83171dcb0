//! Riemannian classifiers for SPD descriptors and confusion-matrix scoring.
//!
//! [`MdrmModel`] assigns a descriptor to the class whose Fréchet mean is
//! nearest in affine-invariant distance. [`TsldaModel`] maps descriptors to
//! the tangent space at the Fréchet mean of the whole training set and scores
//! them with one shrinkage Fisher discriminant per class (one versus rest).
//! Ties go to the smaller class index in both.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{cholesky, cholesky_solve, dot, Matrix};
use crate::spdgeom::{riemann_distance, riemannian_mean, tangent_dim, MeanParams, TangentSpace};
use crate::{Error, Result, SpdMatrix};

/// Pivot threshold, relative to the largest diagonal entry, below which the
/// shrunk scatter is treated as singular.
const SCATTER_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub descriptor: SpdMatrix,
    pub label: usize,
}

impl LabeledSample {
    pub fn new(descriptor: SpdMatrix, label: usize) -> Self {
        Self { descriptor, label }
    }
}

pub trait Classifier {
    fn n_classes(&self) -> usize;

    /// Descriptor dimension `n`.
    fn dim(&self) -> usize;

    fn predict(&self, p: &SpdMatrix) -> Result<usize>;
}

/// Groups descriptors by label, checking labels, dimensions and per-class
/// counts.
fn group(samples: &[LabeledSample], n_classes: usize, min_per_class: usize) -> Result<Vec<Vec<&SpdMatrix>>> {
    if n_classes < 2 {
        return Err(Error::InvalidParameter("at least 2 classes are required"));
    }
    let n = samples.first().ok_or(Error::EmptyInput)?.descriptor.n();
    let mut groups = vec![Vec::new(); n_classes];
    for s in samples {
        if s.label >= n_classes {
            return Err(Error::LabelOutOfRange {
                label: s.label,
                classes: n_classes,
            });
        }
        check_dim(n, &s.descriptor)?;
        groups[s.label].push(&s.descriptor);
    }
    for (class, g) in groups.iter().enumerate() {
        if g.is_empty() {
            return Err(Error::EmptyClass { class });
        }
        if g.len() < min_per_class {
            return Err(Error::InsufficientSamples {
                class,
                count: g.len(),
                required: min_per_class,
            });
        }
    }
    Ok(groups)
}

fn check_dim(n: usize, p: &SpdMatrix) -> Result<()> {
    if p.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.n(),
        });
    }
    Ok(())
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Minimum distance to Riemannian mean.
#[derive(Debug, Clone, PartialEq)]
pub struct MdrmModel {
    class_means: Vec<SpdMatrix>,
}

impl MdrmModel {
    /// One Fréchet mean per class. An iteration that runs out of steps keeps
    /// its last iterate.
    pub fn train(samples: &[LabeledSample], n_classes: usize, params: MeanParams) -> Result<Self> {
        let groups = group(samples, n_classes, 1)?;
        let class_means = groups
            .into_iter()
            .map(|g| {
                let items: Vec<SpdMatrix> = g.into_iter().cloned().collect();
                riemannian_mean(&items, params).map(|r| r.mean)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { class_means })
    }

    pub fn from_means(class_means: Vec<SpdMatrix>) -> Result<Self> {
        if class_means.len() < 2 {
            return Err(Error::InvalidParameter("at least 2 classes are required"));
        }
        let n = class_means[0].n();
        for m in &class_means {
            check_dim(n, m)?;
        }
        Ok(Self { class_means })
    }

    pub fn class_means(&self) -> &[SpdMatrix] {
        &self.class_means
    }

    /// Distance from `p` to every class mean, in class order.
    pub fn distances(&self, p: &SpdMatrix) -> Result<Vec<f64>> {
        check_dim(self.dim(), p)?;
        self.class_means.iter().map(|g| riemann_distance(p, g)).collect()
    }
}

impl Classifier for MdrmModel {
    fn n_classes(&self) -> usize {
        self.class_means.len()
    }

    fn dim(&self) -> usize {
        self.class_means[0].n()
    }

    fn predict(&self, p: &SpdMatrix) -> Result<usize> {
        Ok(argmin(&self.distances(p)?))
    }
}

/// One-versus-rest linear discriminants in the tangent space at a reference
/// point.
#[derive(Debug, Clone, PartialEq)]
pub struct TsldaModel {
    tangent: TangentSpace,
    gamma: f64,
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
}

impl TsldaModel {
    /// Fits the reference point and all `n_classes` discriminants.
    ///
    /// With tangent vectors `sᵢ`, class means `μ_c`, and `μ_rest` the mean of
    /// every sample outside class `c`:
    ///
    /// - `Σ_w = Σ_c Σ_{i∈c} (sᵢ − μ_c)(sᵢ − μ_c)ᵀ / (N − C)`
    /// - `Σ_γ = (1 − γ) Σ_w + γ (tr Σ_w / m) I`
    /// - `w_c = Σ_γ⁻¹ (μ_c − μ_rest)`, `b_c = −w_cᵀ (μ_c + μ_rest) / 2`
    pub fn train(samples: &[LabeledSample], n_classes: usize, gamma: f64, params: MeanParams) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter("shrinkage gamma must lie in [0, 1]"));
        }
        let groups = group(samples, n_classes, 2)?;
        let all: Vec<SpdMatrix> = samples.iter().map(|s| s.descriptor.clone()).collect();
        let reference = riemannian_mean(&all, params)?.mean;
        let tangent = TangentSpace::at(&reference)?;
        let m = tangent_dim(reference.n());

        let vectors: Vec<Vec<Vec<f64>>> = groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|p| tangent.coords(p).map(|v| v.values().to_vec()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let sums: Vec<Vec<f64>> = vectors.iter().map(|vs| sum_vectors(vs, m)).collect();
        let means: Vec<Vec<f64>> = sums
            .iter()
            .zip(&vectors)
            .map(|(s, vs)| s.iter().map(|x| x / vs.len() as f64).collect())
            .collect();
        let total: Vec<f64> = sum_vectors(&sums, m);

        let mut scatter = Matrix::zeros(m);
        let mut dev = vec![0.0; m];
        for (vs, mu) in vectors.iter().zip(&means) {
            for v in vs {
                for k in 0..m {
                    dev[k] = v[k] - mu[k];
                }
                for a in 0..m {
                    for b in a..m {
                        scatter[(a, b)] += dev[a] * dev[b];
                    }
                }
            }
        }
        let dof = (samples.len() - n_classes) as f64;
        let ridge = gamma * scatter.trace() / dof / m as f64;
        for a in 0..m {
            for b in a..m {
                let v = (1.0 - gamma) * scatter[(a, b)] / dof;
                scatter[(a, b)] = v;
                scatter[(b, a)] = v;
            }
            scatter[(a, a)] += ridge;
        }
        let chol = cholesky(&scatter, SCATTER_REL_TOL).ok_or(Error::SingularScatter)?;

        let n_total = samples.len() as f64;
        let mut weights = Vec::with_capacity(n_classes);
        let mut biases = Vec::with_capacity(n_classes);
        for c in 0..n_classes {
            let n_rest = n_total - vectors[c].len() as f64;
            let rest: Vec<f64> = (0..m).map(|k| (total[k] - sums[c][k]) / n_rest).collect();
            let diff: Vec<f64> = (0..m).map(|k| means[c][k] - rest[k]).collect();
            let mid: Vec<f64> = (0..m).map(|k| 0.5 * (means[c][k] + rest[k])).collect();
            let w = cholesky_solve(&chol, &diff);
            biases.push(-dot(&w, &mid));
            weights.push(w);
        }
        Ok(Self {
            tangent,
            gamma,
            weights,
            biases,
        })
    }

    /// Reassembles a trained model, e.g. after deserialization.
    pub fn from_parts(reference: SpdMatrix, gamma: f64, weights: Vec<Vec<f64>>, biases: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 || weights.len() != biases.len() {
            return Err(Error::InvalidParameter(
                "need matching weights and biases for at least 2 classes",
            ));
        }
        let m = tangent_dim(reference.n());
        if let Some(w) = weights.iter().find(|w| w.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: w.len(),
            });
        }
        Ok(Self {
            tangent: TangentSpace::at(&reference)?,
            gamma,
            weights,
            biases,
        })
    }

    pub fn reference_mean(&self) -> &SpdMatrix {
        self.tangent.base()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// `w_cᵀ s + b_c` for every class.
    pub fn scores(&self, p: &SpdMatrix) -> Result<Vec<f64>> {
        check_dim(self.dim(), p)?;
        let s = self.tangent.coords(p)?;
        Ok(self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| dot(w, s.values()) + b)
            .collect())
    }
}

fn sum_vectors(vs: &[Vec<f64>], m: usize) -> Vec<f64> {
    let mut acc = vec![0.0; m];
    for v in vs {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    acc
}

impl Classifier for TsldaModel {
    fn n_classes(&self) -> usize {
        self.weights.len()
    }

    fn dim(&self) -> usize {
        self.tangent.base().n()
    }

    fn predict(&self, p: &SpdMatrix) -> Result<usize> {
        Ok(argmax(&self.scores(p)?))
    }
}

/// Counts indexed `[true][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        Self {
            classes,
            counts: vec![0; classes * classes],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let classes = rows.len();
        let mut cm = Self::new(classes);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != classes {
                return Err(Error::DimensionMismatch {
                    expected: classes,
                    found: row.len(),
                });
            }
            cm.counts[t * classes..(t + 1) * classes].copy_from_slice(row);
        }
        Ok(cm)
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.counts[truth * self.classes + predicted] += 1;
    }

    pub fn count(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.classes + predicted]
    }

    pub fn row(&self, truth: usize) -> &[u64] {
        &self.counts[truth * self.classes..(truth + 1) * self.classes]
    }

    pub fn row_total(&self, truth: usize) -> u64 {
        self.row(truth).iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.classes).map(|c| self.count(c, c)).sum()
    }

    /// Diagonal over row sum; `None` for a class with no samples.
    pub fn class_accuracy(&self, truth: usize) -> Option<f64> {
        let total = self.row_total(truth);
        (total > 0).then(|| self.count(truth, truth) as f64 / total as f64)
    }

    /// Trace over total; `None` when empty.
    pub fn overall_accuracy(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| self.correct() as f64 / total as f64)
    }
}

pub fn evaluate<C: Classifier + ?Sized>(model: &C, test: &[LabeledSample]) -> Result<ConfusionMatrix> {
    if test.is_empty() {
        return Err(Error::EmptyInput);
    }
    let classes = model.n_classes();
    let mut cm = ConfusionMatrix::new(classes);
    for s in test {
        if s.label >= classes {
            return Err(Error::LabelOutOfRange {
                label: s.label,
                classes,
            });
        }
        cm.record(s.label, model.predict(&s.descriptor)?);
    }
    Ok(cm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spdgeom::{exp_map, spd_exp, upper_vec, SymMatrix};
    use crate::TangentVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diag(d).unwrap()
    }

    fn random_sym(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SymMatrix {
        let a = Matrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0) * scale);
        SymMatrix::symmetrize(&a)
    }

    #[test]
    fn mdrm_single_sample_per_class() {
        let a = diag(&[1.0, 2.0]);
        let b = diag(&[3.0, 0.5]);
        let samples = [LabeledSample::new(a.clone(), 0), LabeledSample::new(b.clone(), 1)];
        let model = MdrmModel::train(&samples, 2, MeanParams::default()).unwrap();
        assert_eq!(model.class_means(), [a.clone(), b.clone()]);
        assert_eq!(model.predict(&a).unwrap(), 0);
        assert_eq!(model.predict(&b).unwrap(), 1);
    }

    #[test]
    fn mdrm_commuting_pair_mean() {
        let samples = [
            LabeledSample::new(diag(&[1.0, 4.0]), 0),
            LabeledSample::new(diag(&[4.0, 1.0]), 0),
            LabeledSample::new(diag(&[5.0, 5.0]), 1),
            LabeledSample::new(diag(&[5.0, 5.0]), 1),
        ];
        let model = MdrmModel::train(&samples, 2, MeanParams::default()).unwrap();
        let g0 = model.class_means()[0].matrix();
        assert!(g0.sub(&Matrix::from_diag(&[2.0, 2.0])).max_abs() < 1e-10);
        assert!(
            model.class_means()[1]
                .matrix()
                .sub(&Matrix::from_diag(&[5.0, 5.0]))
                .max_abs()
                < 1e-12
        );
    }

    #[test]
    fn mdrm_diagonal_distances() {
        let e4 = 4f64.exp();
        let model = MdrmModel::from_means(vec![SpdMatrix::identity(3), diag(&[e4, 1.0, 1.0])]).unwrap();
        let p = diag(&[1f64.exp(), 1.0, 1.0]);
        let d = model.distances(&p).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12 && (d[1] - 3.0).abs() < 1e-12);
        assert_eq!(model.predict(&p).unwrap(), 0);
    }

    #[test]
    fn mdrm_errors() {
        let samples = [LabeledSample::new(diag(&[1.0, 1.0]), 0)];
        assert_eq!(
            MdrmModel::train(&samples, 2, MeanParams::default()),
            Err(Error::EmptyClass { class: 1 })
        );
        let bad = [LabeledSample::new(diag(&[1.0, 1.0]), 3)];
        assert_eq!(
            MdrmModel::train(&bad, 2, MeanParams::default()),
            Err(Error::LabelOutOfRange { label: 3, classes: 2 })
        );
        let model = MdrmModel::from_means(vec![diag(&[1.0, 1.0]), diag(&[2.0, 2.0])]).unwrap();
        assert_eq!(
            model.predict(&SpdMatrix::identity(3)),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn mdrm_ties_go_to_lower_index() {
        let p = diag(&[2.0, 2.0]);
        let model = MdrmModel::from_means(vec![p.clone(), p.clone(), p.clone()]).unwrap();
        assert_eq!(model.predict(&SpdMatrix::identity(2)).unwrap(), 0);
    }

    /// Symmetric basis matrix whose `upper_vec` is a unit coordinate vector.
    fn tangent_basis(n: usize, k: usize) -> SymMatrix {
        let mut v = vec![0.0; tangent_dim(n)];
        v[k] = 1.0;
        crate::spdgeom::unupper_vec(&TangentVector::new(v), n).unwrap()
    }

    /// Two classes that are mirror images under inversion, so the pooled
    /// Fréchet mean is the identity; each class is a perfectly isotropic
    /// cross of tangent offsets around its center.
    fn mirrored_isotropic(center: &SymMatrix, sigma: f64) -> Vec<LabeledSample> {
        let n = center.n();
        let mut out = Vec::new();
        for k in 0..tangent_dim(n) {
            for sign in [1.0, -1.0] {
                let off = tangent_basis(n, k).scale(sign * sigma);
                let s = SymMatrix::symmetrize(&center.matrix().add(off.matrix()));
                out.push(LabeledSample::new(spd_exp(&s), 0));
                out.push(LabeledSample::new(spd_exp(&s.scale(-1.0)), 1));
            }
        }
        out
    }

    fn angle(a: &[f64], b: &[f64]) -> f64 {
        let c = dot(a, b) / (dot(a, a).sqrt() * dot(b, b).sqrt());
        c.clamp(-1.0, 1.0).acos()
    }

    #[test]
    fn tslda_isotropic_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let center = random_sym(&mut rng, 3, 0.5);
        let samples = mirrored_isotropic(&center, 0.2);
        let params = MeanParams {
            eps: 1e-12,
            max_iters: 100,
        };
        let model = TsldaModel::train(&samples, 2, 0.1, params).unwrap();
        assert!(model.reference_mean().matrix().sub(&Matrix::identity(3)).max_abs() < 1e-10);
        let mu0 = upper_vec(&center);
        let diff: Vec<f64> = mu0.values().iter().map(|v| 2.0 * v).collect();
        assert!(angle(&model.weights()[0], &diff) < 1e-6);
        let neg: Vec<f64> = diff.iter().map(|v| -v).collect();
        assert!(angle(&model.weights()[1], &neg) < 1e-6);
    }

    fn cluster_samples(
        rng: &mut ChaCha8Rng,
        n: usize,
        classes: usize,
        per_class: usize,
        spread: f64,
    ) -> Vec<LabeledSample> {
        let centers: Vec<SpdMatrix> = (0..classes).map(|_| spd_exp(&random_sym(rng, n, 1.5))).collect();
        let mut out = Vec::new();
        for (c, g) in centers.iter().enumerate() {
            for _ in 0..per_class {
                let s = random_sym(rng, n, spread);
                out.push(LabeledSample::new(exp_map(g, &s).unwrap(), c));
            }
        }
        out
    }

    /// Gaussian elimination with partial pivoting.
    fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
            x[r] = (b[r] - s) / a[r][r];
        }
        x
    }

    #[test]
    fn tslda_matches_direct_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples = cluster_samples(&mut rng, 3, 3, 12, 0.3);
        let gamma = 0.25;
        let model = TsldaModel::train(&samples, 3, gamma, MeanParams::default()).unwrap();
        let space = TangentSpace::at(model.reference_mean()).unwrap();
        let s: Vec<Vec<f64>> = samples
            .iter()
            .map(|x| space.coords(&x.descriptor).unwrap().values().to_vec())
            .collect();
        let m = s[0].len();
        let mean_of = |pred: &dyn Fn(usize) -> bool| {
            let idx: Vec<usize> = (0..samples.len()).filter(|&i| pred(samples[i].label)).collect();
            (0..m)
                .map(|k| idx.iter().map(|&i| s[i][k]).sum::<f64>() / idx.len() as f64)
                .collect::<Vec<_>>()
        };
        let mus: Vec<Vec<f64>> = (0..3).map(|c| mean_of(&|l| l == c)).collect();
        let mut sw = vec![vec![0.0; m]; m];
        for (i, x) in samples.iter().enumerate() {
            for a in 0..m {
                for b in 0..m {
                    sw[a][b] += (s[i][a] - mus[x.label][a]) * (s[i][b] - mus[x.label][b]);
                }
            }
        }
        let dof = (samples.len() - 3) as f64;
        let tr: f64 = (0..m).map(|a| sw[a][a]).sum::<f64>() / dof;
        for a in 0..m {
            for b in 0..m {
                sw[a][b] = (1.0 - gamma) * sw[a][b] / dof + if a == b { gamma * tr / m as f64 } else { 0.0 };
            }
        }
        for c in 0..3 {
            let rest = mean_of(&|l| l != c);
            let diff: Vec<f64> = (0..m).map(|k| mus[c][k] - rest[k]).collect();
            let w = solve(sw.clone(), diff);
            let b = -(0..m).map(|k| w[k] * 0.5 * (mus[c][k] + rest[k])).sum::<f64>();
            for k in 0..m {
                assert!((w[k] - model.weights()[c][k]).abs() <= 1e-8 * (1.0 + w[k].abs()));
            }
            assert!((b - model.biases()[c]).abs() <= 1e-8 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn tslda_full_shrinkage_uses_mean_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples = cluster_samples(&mut rng, 2, 2, 6, 0.4);
        let model = TsldaModel::train(&samples, 2, 1.0, MeanParams::default()).unwrap();
        let space = TangentSpace::at(model.reference_mean()).unwrap();
        let mut mu = [vec![0.0; 3], vec![0.0; 3]];
        for x in &samples {
            for (a, v) in mu[x.label]
                .iter_mut()
                .zip(space.coords(&x.descriptor).unwrap().values())
            {
                *a += v / 6.0;
            }
        }
        let diff: Vec<f64> = (0..3).map(|k| mu[0][k] - mu[1][k]).collect();
        assert!(angle(&model.weights()[0], &diff) < 1e-9);
    }

    #[test]
    fn tslda_separable_training_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let samples = cluster_samples(&mut rng, 3, 4, 15, 0.1);
        let model = TsldaModel::train(&samples, 4, 0.1, MeanParams::default()).unwrap();
        let cm = evaluate(&model, &samples).unwrap();
        assert_eq!(cm.correct(), cm.total());
    }

    #[test]
    fn tslda_reference_point_scores_are_biases() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let samples = cluster_samples(&mut rng, 3, 3, 5, 0.3);
        let model = TsldaModel::train(&samples, 3, 0.1, MeanParams::default()).unwrap();
        let scores = model.scores(&model.reference_mean().clone()).unwrap();
        for (s, b) in scores.iter().zip(model.biases()) {
            assert!((s - b).abs() < 1e-12);
        }
        assert_eq!(
            model.predict(&model.reference_mean().clone()).unwrap(),
            argmax(model.biases())
        );
    }

    #[test]
    fn tslda_two_class_sign_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples = cluster_samples(&mut rng, 2, 2, 8, 0.3);
        let model = TsldaModel::train(&samples, 2, 0.1, MeanParams::default()).unwrap();
        // one-vs-rest with two classes gives w₀ = −w₁, b₀ = −b₁
        for (a, b) in model.weights()[0].iter().zip(&model.weights()[1]) {
            assert!((a + b).abs() < 1e-12);
        }
        assert!((model.biases()[0] + model.biases()[1]).abs() < 1e-12);
        for x in &samples {
            let s = model.scores(&x.descriptor).unwrap();
            let expected = usize::from(s[1] > 0.0);
            assert_eq!(model.predict(&x.descriptor).unwrap(), expected);
        }
    }

    #[test]
    fn tslda_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut samples = cluster_samples(&mut rng, 2, 2, 3, 0.3);
        samples.truncate(4);
        assert_eq!(
            TsldaModel::train(&samples, 2, 0.1, MeanParams::default()),
            Err(Error::InsufficientSamples {
                class: 1,
                count: 1,
                required: 2
            })
        );
        // repeated descriptors leave zero within-class scatter
        let p = diag(&[1.0, 2.0]);
        let q = diag(&[3.0, 1.0]);
        let degenerate = [
            LabeledSample::new(p.clone(), 0),
            LabeledSample::new(p.clone(), 0),
            LabeledSample::new(q.clone(), 1),
            LabeledSample::new(q, 1),
        ];
        assert_eq!(
            TsldaModel::train(&degenerate, 2, 0.0, MeanParams::default()),
            Err(Error::SingularScatter)
        );
        assert!(TsldaModel::train(&degenerate, 2, 1.5, MeanParams::default()).is_err());
    }

    #[test]
    fn scaling_discriminants_keeps_predictions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let samples = cluster_samples(&mut rng, 3, 3, 6, 0.5);
        let model = TsldaModel::train(&samples, 3, 0.1, MeanParams::default()).unwrap();
        let alpha = 7.5;
        let scaled = TsldaModel::from_parts(
            model.reference_mean().clone(),
            model.gamma(),
            model
                .weights()
                .iter()
                .map(|w| w.iter().map(|v| v * alpha).collect())
                .collect(),
            model.biases().iter().map(|b| b * alpha).collect(),
        )
        .unwrap();
        for x in &samples {
            assert_eq!(model.predict(&x.descriptor), scaled.predict(&x.descriptor));
        }
    }

    #[test]
    fn confusion_matrix_table_rows() {
        let cm = ConfusionMatrix::from_rows(&[
            vec![50, 0, 0, 0, 0],
            vec![0, 40, 0, 0, 0],
            vec![0, 0, 60, 1, 0],
            vec![0, 0, 3, 44, 0],
            vec![0, 0, 0, 0, 30],
        ])
        .unwrap();
        let pct = |c| (cm.class_accuracy(c).unwrap() * 10000.0).round() / 100.0;
        assert_eq!(pct(2), 98.36);
        assert_eq!(pct(3), 93.62);
        assert_eq!(cm.row_total(2), 61);
        assert_eq!(cm.total(), 228);
        let weighted: f64 = (0..5)
            .map(|c| cm.class_accuracy(c).unwrap() * cm.row_total(c) as f64)
            .sum::<f64>()
            / cm.total() as f64;
        assert!((weighted - cm.overall_accuracy().unwrap()).abs() < 1e-15);
    }

    #[test]
    fn evaluate_perfect_predictor() {
        let means = vec![diag(&[1.0, 1.0]), diag(&[10.0, 1.0]), diag(&[1.0, 10.0])];
        let model = MdrmModel::from_means(means.clone()).unwrap();
        let test: Vec<_> = means
            .iter()
            .enumerate()
            .flat_map(|(c, m)| [LabeledSample::new(m.clone(), c), LabeledSample::new(m.clone(), c)])
            .collect();
        let cm = evaluate(&model, &test).unwrap();
        assert_eq!(cm.overall_accuracy(), Some(1.0));
        for t in 0..3 {
            assert_eq!(cm.row_total(t), 2);
            for p in 0..3 {
                assert_eq!(cm.count(t, p), if t == p { 2 } else { 0 });
            }
        }
        assert_eq!(evaluate(&model, &[]), Err(Error::EmptyInput));
    }
}

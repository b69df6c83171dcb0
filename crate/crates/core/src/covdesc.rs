//! Region covariance descriptors.
//!
//! A [`FeatureStack`] holds `d` per-pixel feature layers computed from an
//! intensity plane. The covariance of the feature vectors inside a region is
//! an SPD matrix once a small ridge is added (see [`regularize`]).
//!
//! Two evaluation paths are provided: [`region_covariance`] visits the
//! region's pixels directly and honors its mask; [`IntegralCovariance`]
//! answers rectangle queries in `O(d²)` from summed-area tables.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::linalg::Matrix;
use crate::math;
use crate::preprocess::Roi;
use crate::spdgeom::{SpdMatrix, SymMatrix};
use crate::{Error, Result, ScalarPlane};

/// Ridge coefficient of [`regularize`].
pub const RIDGE_EPS: f64 = 1e-6;

/// One per-pixel feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    /// Column index relative to the plane origin.
    X,
    /// Row index relative to the plane origin.
    Y,
    AbsIx,
    AbsIy,
    /// `sqrt(I_x² + I_y²)`.
    GradMag,
    AbsIxx,
    AbsIxy,
    AbsIyy,
    /// `arctan(|I_x| / |I_y|)`, `π/2` when only `I_y` vanishes, 0 when both do.
    EdgeAngle,
}

impl Feature {
    pub const ALL: [Feature; 9] = [
        Feature::X,
        Feature::Y,
        Feature::AbsIx,
        Feature::AbsIy,
        Feature::GradMag,
        Feature::AbsIxx,
        Feature::AbsIxy,
        Feature::AbsIyy,
        Feature::EdgeAngle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::X => "x",
            Feature::Y => "y",
            Feature::AbsIx => "ix",
            Feature::AbsIy => "iy",
            Feature::GradMag => "grad",
            Feature::AbsIxx => "ixx",
            Feature::AbsIxy => "ixy",
            Feature::AbsIyy => "iyy",
            Feature::EdgeAngle => "angle",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Feature::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or(Error::InvalidParameter("unknown feature name"))
    }
}

/// `d` feature layers of identical size.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStack {
    width: usize,
    height: usize,
    layers: Vec<ScalarPlane>,
}

impl FeatureStack {
    pub fn from_layers(layers: Vec<ScalarPlane>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(Error::InvalidParameter("a feature stack needs at least 2 layers"));
        }
        let (width, height) = (layers[0].width(), layers[0].height());
        if layers.iter().any(|l| l.width() != width || l.height() != height) {
            return Err(Error::InvalidDimensions("feature layers differ in size"));
        }
        Ok(Self { width, height, layers })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[ScalarPlane] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<ScalarPlane> {
        self.layers
    }

    fn check_roi(&self, roi: &Roi) -> Result<()> {
        if roi.x1 >= self.width || roi.y1 >= self.height {
            return Err(Error::InvalidDimensions("region outside feature stack"));
        }
        Ok(())
    }
}

/// Computes the selected feature layers of an intensity plane.
///
/// Derivatives use unnormalized central differences with replicated borders:
/// `[-1, 0, 1]` for first order, `[1, -2, 1]` for second order along one axis,
/// and the outer product of two `[-1, 0, 1]` kernels for `I_xy`.
pub fn feature_map(gray: &ScalarPlane, features: &[Feature]) -> Result<FeatureStack> {
    if features.len() < 2 {
        return Err(Error::InvalidParameter("a feature stack needs at least 2 layers"));
    }
    let (w, h) = (gray.width(), gray.height());
    let at = |x: isize, y: isize| {
        let cx = x.clamp(0, w as isize - 1) as usize;
        let cy = y.clamp(0, h as isize - 1) as usize;
        gray.get(cx, cy)
    };
    let n = w * h;
    let mut ix = vec![0.0; n];
    let mut iy = vec![0.0; n];
    let mut ixx = vec![0.0; n];
    let mut iyy = vec![0.0; n];
    let mut ixy = vec![0.0; n];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let i = y as usize * w + x as usize;
            let c = at(x, y);
            let (l, r, u, d) = (at(x - 1, y), at(x + 1, y), at(x, y - 1), at(x, y + 1));
            ix[i] = r - l;
            iy[i] = d - u;
            ixx[i] = r - 2.0 * c + l;
            iyy[i] = d - 2.0 * c + u;
            ixy[i] = at(x + 1, y + 1) - at(x - 1, y + 1) - at(x + 1, y - 1) + at(x - 1, y - 1);
        }
    }
    let layers = features
        .iter()
        .map(|f| {
            let values: Vec<f64> = match f {
                Feature::X => (0..n).map(|i| (i % w) as f64).collect(),
                Feature::Y => (0..n).map(|i| (i / w) as f64).collect(),
                Feature::AbsIx => ix.iter().map(|v| v.abs()).collect(),
                Feature::AbsIy => iy.iter().map(|v| v.abs()).collect(),
                Feature::GradMag => ix.iter().zip(&iy).map(|(a, b)| math::hypot(*a, *b)).collect(),
                Feature::AbsIxx => ixx.iter().map(|v| v.abs()).collect(),
                Feature::AbsIxy => ixy.iter().map(|v| v.abs()).collect(),
                Feature::AbsIyy => iyy.iter().map(|v| v.abs()).collect(),
                Feature::EdgeAngle => ix.iter().zip(&iy).map(|(a, b)| math::atan2(a.abs(), b.abs())).collect(),
            };
            ScalarPlane::new(w, h, values)
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureStack::from_layers(layers)
}

/// Unbiased sample covariance `(1/(S−1)) Σ (zᵢ − μ)(zᵢ − μ)ᵀ` of the feature
/// vectors at the region's member pixels, without regularization.
pub fn region_scatter(stack: &FeatureStack, roi: &Roi) -> Result<SymMatrix> {
    stack.check_roi(roi)?;
    if roi.area < 2 {
        return Err(Error::RegionTooSmall { area: roi.area });
    }
    let d = stack.depth();
    let w = stack.width();
    let members: Vec<usize> = (roi.y0..=roi.y1)
        .flat_map(|y| (roi.x0..=roi.x1).map(move |x| (x, y)))
        .filter(|&(x, y)| roi.contains(x, y))
        .map(|(x, y)| y * w + x)
        .collect();
    let s = members.len() as f64;
    let mean: Vec<f64> = stack
        .layers
        .iter()
        .map(|l| members.iter().map(|&i| l.values()[i]).sum::<f64>() / s)
        .collect();
    let mut cov = Matrix::zeros(d);
    let mut z = vec![0.0; d];
    for &i in &members {
        for (k, l) in stack.layers.iter().enumerate() {
            z[k] = l.values()[i] - mean[k];
        }
        for a in 0..d {
            for b in a..d {
                cov[(a, b)] += z[a] * z[b];
            }
        }
    }
    finish_upper(&mut cov, s - 1.0);
    Ok(SymMatrix::new(cov).expect("constructed symmetric"))
}

fn finish_upper(cov: &mut Matrix, divisor: f64) {
    let d = cov.n();
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / divisor;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
}

/// `C + ε · max(tr(C)/d, 1) · I`, which lifts the smallest eigenvalue of a
/// positive semi-definite `C` to at least `ε`.
pub fn regularize(c: &SymMatrix) -> SpdMatrix {
    let d = c.n();
    let ridge = RIDGE_EPS * (c.matrix().trace() / d as f64).max(1.0);
    let mut m = c.matrix().clone();
    for i in 0..d {
        m[(i, i)] += ridge;
    }
    SpdMatrix::new_unchecked(m)
}

/// Regularized region covariance over the region's member pixels.
pub fn region_covariance(stack: &FeatureStack, roi: &Roi) -> Result<SpdMatrix> {
    Ok(regularize(&region_scatter(stack, roi)?))
}

/// Regularized covariance over the region's full bounding rectangle, via
/// summed-area tables. Builds the tables for a single query; reuse an
/// [`IntegralCovariance`] for many.
pub fn region_covariance_fast(stack: &FeatureStack, roi: &Roi) -> Result<SpdMatrix> {
    IntegralCovariance::new(stack).covariance(roi)
}

/// Summed-area tables of every feature and every pairwise feature product.
///
/// Each layer is shifted by its global mean before accumulation; covariance
/// is shift-invariant and the shift keeps the product sums well conditioned.
#[derive(Debug, Clone)]
pub struct IntegralCovariance {
    width: usize,
    height: usize,
    depth: usize,
    /// Per table cell: `d` first-order sums followed by `d(d+1)/2` products
    /// (upper triangle, row-major). Table is `(width+1) × (height+1)`.
    table: Vec<f64>,
}

impl IntegralCovariance {
    pub fn new(stack: &FeatureStack) -> Self {
        let (w, h, d) = (stack.width(), stack.height(), stack.depth());
        let stride = d + d * (d + 1) / 2;
        let shifts: Vec<f64> = stack
            .layers
            .iter()
            .map(|l| l.values().iter().sum::<f64>() / l.values().len() as f64)
            .collect();
        let mut table = vec![0.0; (w + 1) * (h + 1) * stride];
        let mut z = vec![0.0; d];
        let mut row = vec![0.0; stride];
        for y in 0..h {
            row.iter_mut().for_each(|v| *v = 0.0);
            for x in 0..w {
                let i = y * w + x;
                for k in 0..d {
                    z[k] = stack.layers[k].values()[i] - shifts[k];
                }
                let mut slot = d;
                for a in 0..d {
                    row[a] += z[a];
                    for b in a..d {
                        row[slot] += z[a] * z[b];
                        slot += 1;
                    }
                }
                let above = (y * (w + 1) + x + 1) * stride;
                let here = ((y + 1) * (w + 1) + x + 1) * stride;
                for s in 0..stride {
                    table[here + s] = table[above + s] + row[s];
                }
            }
        }
        Self {
            width: w,
            height: h,
            depth: d,
            table,
        }
    }

    fn stride(&self) -> usize {
        self.depth + self.depth * (self.depth + 1) / 2
    }

    /// Unregularized covariance of the inclusive rectangle of `roi`; the
    /// region mask is ignored.
    pub fn scatter(&self, roi: &Roi) -> Result<SymMatrix> {
        if roi.x1 >= self.width || roi.y1 >= self.height {
            return Err(Error::InvalidDimensions("region outside feature stack"));
        }
        let area = roi.box_area();
        if area < 2 {
            return Err(Error::RegionTooSmall { area });
        }
        let stride = self.stride();
        let cell = |x: usize, y: usize| (y * (self.width + 1) + x) * stride;
        let (a, b, c, e) = (
            cell(roi.x1 + 1, roi.y1 + 1),
            cell(roi.x0, roi.y1 + 1),
            cell(roi.x1 + 1, roi.y0),
            cell(roi.x0, roi.y0),
        );
        let sum = |s: usize| self.table[a + s] - self.table[b + s] - self.table[c + s] + self.table[e + s];
        let d = self.depth;
        let s = area as f64;
        let firsts: Vec<f64> = (0..d).map(sum).collect();
        let mut cov = Matrix::zeros(d);
        let mut slot = d;
        for i in 0..d {
            for j in i..d {
                cov[(i, j)] = sum(slot) - firsts[i] * firsts[j] / s;
                slot += 1;
            }
        }
        finish_upper(&mut cov, s - 1.0);
        Ok(SymMatrix::new(cov).expect("constructed symmetric"))
    }

    pub fn covariance(&self, roi: &Roi) -> Result<SpdMatrix> {
        Ok(regularize(&self.scatter(roi)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    fn constant(w: usize, h: usize, v: f64) -> ScalarPlane {
        ScalarPlane::new(w, h, vec![v; w * h]).unwrap()
    }

    #[test]
    fn constant_plane_features() {
        let stack = feature_map(&constant(5, 5, 3.0), &Feature::ALL).unwrap();
        assert_eq!(stack.depth(), 9);
        let l = stack.layers();
        for y in 0..5 {
            for x in 0..5 {
                assert_eq!(l[0].get(x, y), x as f64);
                assert_eq!(l[1].get(x, y), y as f64);
            }
        }
        for layer in &l[2..] {
            assert!(layer.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn ramp_derivatives() {
        let ramp = ScalarPlane::from_fn(6, 4, |x, _| x as f64).unwrap();
        let stack = feature_map(&ramp, &Feature::ALL).unwrap();
        let l = stack.layers();
        for y in 0..4 {
            for x in 1..5 {
                assert_eq!(l[2].get(x, y), 2.0);
            }
            // replicated border halves the span
            assert_eq!(l[2].get(0, y), 1.0);
            for x in 0..6 {
                assert_eq!(l[3].get(x, y), 0.0);
                assert_eq!(l[8].get(x, y), FRAC_PI_2);
                assert_eq!(l[4].get(x, y), l[2].get(x, y));
            }
        }
    }

    #[test]
    fn quadratic_second_derivative() {
        let q = ScalarPlane::from_fn(7, 3, |x, _| (x * x) as f64).unwrap();
        let stack = feature_map(&q, &[Feature::AbsIxx, Feature::AbsIyy, Feature::AbsIxy]).unwrap();
        for y in 0..3 {
            for x in 1..6 {
                assert_eq!(stack.layers()[0].get(x, y), 2.0);
            }
        }
        assert!(stack.layers()[1].values().iter().all(|&v| v == 0.0));
        assert!(stack.layers()[2].values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn saddle_cross_derivative() {
        let p = ScalarPlane::from_fn(5, 5, |x, y| (x * y) as f64).unwrap();
        let stack = feature_map(&p, &[Feature::AbsIxy, Feature::X]).unwrap();
        // (x+1)(y+1) - (x-1)(y+1) - (x+1)(y-1) + (x-1)(y-1) = 4
        assert_eq!(stack.layers()[0].get(2, 2), 4.0);
    }

    #[test]
    fn selector_length_sets_depth() {
        let p = constant(4, 4, 1.0);
        assert_eq!(feature_map(&p, &Feature::ALL[..8]).unwrap().depth(), 8);
        assert!(feature_map(&p, &[Feature::X]).is_err());
        assert_eq!("grad".parse::<Feature>().unwrap(), Feature::GradMag);
        assert!("gradient".parse::<Feature>().is_err());
    }

    #[test]
    fn constant_three_by_three_covariance() {
        let stack = feature_map(&constant(3, 3, 7.0), &Feature::ALL).unwrap();
        let c = region_scatter(&stack, &Roi::rect(0, 0, 2, 2)).unwrap();
        let m = c.matrix();
        assert_eq!(m[(0, 0)], 0.75);
        assert_eq!(m[(1, 1)], 0.75);
        for i in 0..9 {
            for j in 0..9 {
                if (i, j) != (0, 0) && (i, j) != (1, 1) {
                    assert_eq!(m[(i, j)], 0.0, "entry ({i},{j})");
                }
            }
        }
        let fast = IntegralCovariance::new(&stack).scatter(&Roi::rect(0, 0, 2, 2)).unwrap();
        assert!(fast.matrix().sub(m).max_abs() < 1e-12);
    }

    #[test]
    fn identical_vectors_give_ridge_only() {
        let stack = feature_map(&constant(4, 4, 2.0), &[Feature::AbsIx, Feature::AbsIy]).unwrap();
        let roi = Roi::rect(1, 1, 2, 1);
        assert_eq!(roi.area, 2);
        let raw = region_scatter(&stack, &roi).unwrap();
        assert_eq!(raw.matrix().max_abs(), 0.0);
        let c = region_covariance(&stack, &roi).unwrap();
        assert_eq!(c.matrix(), &Matrix::from_diag(&[RIDGE_EPS, RIDGE_EPS]));
    }

    #[test]
    fn two_sample_rectangle() {
        let plane = ScalarPlane::from_fn(3, 2, |x, y| (x * 10 + y * 3) as f64).unwrap();
        let stack = FeatureStack::from_layers(vec![
            plane.clone(),
            ScalarPlane::from_fn(3, 2, |x, y| (x as f64 - y as f64).powi(2)).unwrap(),
        ])
        .unwrap();
        // pixels (1,0) and (1,1): z = (10, 1) and (13, 0)
        let roi = Roi::rect(1, 0, 1, 1);
        let expected = [[4.5, -1.5], [-1.5, 0.5]];
        for c in [
            region_scatter(&stack, &roi).unwrap(),
            IntegralCovariance::new(&stack).scatter(&roi).unwrap(),
        ] {
            for i in 0..2 {
                for j in 0..2 {
                    assert!((c.matrix()[(i, j)] - expected[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn region_too_small() {
        let stack = feature_map(&constant(3, 3, 0.0), &Feature::ALL).unwrap();
        let single = Roi::rect(1, 1, 1, 1);
        assert_eq!(
            region_covariance(&stack, &single),
            Err(Error::RegionTooSmall { area: 1 })
        );
        assert_eq!(
            region_covariance_fast(&stack, &single),
            Err(Error::RegionTooSmall { area: 1 })
        );
        let masked = Roi::with_mask(0, 0, 1, 0, vec![true, false]);
        assert_eq!(
            region_covariance(&stack, &masked),
            Err(Error::RegionTooSmall { area: 1 })
        );
    }

    #[test]
    fn mask_restricts_members() {
        let plane = ScalarPlane::from_fn(4, 1, |x, _| [0.0, 5.0, 100.0, 2.0][x]).unwrap();
        let stack = FeatureStack::from_layers(vec![plane.clone(), plane]).unwrap();
        let roi = Roi::with_mask(0, 0, 3, 0, vec![true, true, false, false]);
        let c = region_scatter(&stack, &roi).unwrap();
        assert_eq!(c.matrix()[(0, 0)], 12.5);
    }
}

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{BinaryMask, ByteImage, LabelMask};
use crate::math;
use crate::{Error, Result};

pub const COMPONENTS: usize = 3;
pub const VARIANCE_FLOOR: f64 = 1e-4;

/// Three-component univariate Gaussian mixture over 8-bit intensities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMixture1D {
    pub means: [f64; COMPONENTS],
    pub variances: [f64; COMPONENTS],
    pub weights: [f64; COMPONENTS],
}

impl GaussianMixture1D {
    /// `ln(w_k · N(v; μ_k, σ²_k))`.
    pub fn log_joint(&self, k: usize, v: f64) -> f64 {
        let w = self.weights[k];
        if w <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let var = self.variances[k];
        let d = v - self.means[k];
        math::ln(w) - 0.5 * math::ln(2.0 * PI * var) - d * d / (2.0 * var)
    }

    /// Maximum-posterior component for `v`; ties go to the smaller index.
    pub fn classify(&self, v: f64) -> usize {
        let mut best = 0;
        let mut best_score = self.log_joint(0, v);
        for k in 1..COMPONENTS {
            let s = self.log_joint(k, v);
            if s > best_score {
                best = k;
                best_score = s;
            }
        }
        best
    }

    fn sorted_by_mean(&self) -> Self {
        let mut order = [0, 1, 2];
        order.sort_by(|&i, &j| self.means[i].total_cmp(&self.means[j]));
        Self {
            means: order.map(|k| self.means[k]),
            variances: order.map(|k| self.variances[k]),
            weights: order.map(|k| self.weights[k]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmmFit {
    pub mixture: GaussianMixture1D,
    /// Number of accepted EM steps.
    pub iterations: usize,
    /// False when `max_iters` ran out before the tolerance test fired.
    pub converged: bool,
    /// Log-likelihood of the initialization followed by every accepted step.
    pub log_likelihoods: Vec<f64>,
}

struct Histogram {
    bins: Vec<(f64, f64)>,
    total: f64,
}

impl Histogram {
    fn log_likelihood(&self, gmm: &GaussianMixture1D) -> f64 {
        self.bins
            .iter()
            .map(|&(v, c)| c * log_sum_exp(&core::array::from_fn::<f64, COMPONENTS, _>(|k| gmm.log_joint(k, v))))
            .sum()
    }

    fn em_step(&self, gmm: &GaussianMixture1D) -> GaussianMixture1D {
        let mut mass = [0.0; COMPONENTS];
        let mut first = [0.0; COMPONENTS];
        let mut resp = Vec::with_capacity(self.bins.len());
        for &(v, c) in &self.bins {
            let logs: [f64; COMPONENTS] = core::array::from_fn(|k| gmm.log_joint(k, v));
            let lse = log_sum_exp(&logs);
            let r: [f64; COMPONENTS] = core::array::from_fn(|k| math::exp(logs[k] - lse));
            for k in 0..COMPONENTS {
                mass[k] += c * r[k];
                first[k] += c * r[k] * v;
            }
            resp.push(r);
        }
        let mut next = *gmm;
        for k in 0..COMPONENTS {
            if mass[k] <= 0.0 {
                next.weights[k] = 0.0;
                continue;
            }
            let mean = first[k] / mass[k];
            let second: f64 = self
                .bins
                .iter()
                .zip(&resp)
                .map(|(&(v, c), r)| c * r[k] * (v - mean) * (v - mean))
                .sum();
            next.means[k] = mean;
            next.variances[k] = (second / mass[k]).max(VARIANCE_FLOOR);
            next.weights[k] = mass[k] / self.total;
        }
        let wsum: f64 = next.weights.iter().sum();
        for w in &mut next.weights {
            *w /= wsum;
        }
        next
    }
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + math::ln(values.iter().map(|&v| math::exp(v - m)).sum())
}

/// Fits a three-component mixture to the image's intensity histogram by EM.
///
/// Initialization: means at the 25th/50th/75th percentiles, equal weights,
/// the global variance for every component. A step is accepted only if it
/// raises the log-likelihood by at least `tol · |ℓ|`; the first rejected step
/// ends the fit. Means are sorted ascending on return.
pub fn fit_gmm3(img: &ByteImage, max_iters: usize, tol: f64) -> Result<GmmFit> {
    let counts = img.histogram();
    let distinct = counts.iter().filter(|&&c| c > 0).count();
    if distinct < COMPONENTS {
        return Err(Error::DegenerateInput { distinct });
    }
    let hist = Histogram {
        bins: counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(v, &c)| (v as f64, c as f64))
            .collect(),
        total: img.values().len() as f64,
    };

    let mut gmm = initial_mixture(&counts, &hist);
    let mut ll = hist.log_likelihood(&gmm);
    let mut log_likelihoods = alloc::vec![ll];
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..max_iters {
        let next = hist.em_step(&gmm);
        let next_ll = hist.log_likelihood(&next);
        // Written so that a NaN threshold (tol = ∞ with ℓ = 0) also rejects.
        if !(next_ll - ll >= tol * ll.abs()) {
            converged = true;
            break;
        }
        gmm = next;
        ll = next_ll;
        log_likelihoods.push(ll);
        iterations += 1;
    }
    if max_iters == 0 {
        converged = true;
    }
    Ok(GmmFit {
        mixture: gmm.sorted_by_mean(),
        iterations,
        converged,
        log_likelihoods,
    })
}

fn initial_mixture(counts: &[u64; 256], hist: &Histogram) -> GaussianMixture1D {
    let total: u64 = counts.iter().sum();
    let value_at_rank = |rank: u64| {
        let mut seen = 0;
        for (v, &c) in counts.iter().enumerate() {
            seen += c;
            if seen > rank {
                return v as f64;
            }
        }
        255.0
    };
    let last = (total - 1) as f64;
    let mut means = [0.25, 0.5, 0.75].map(|p| value_at_rank(math::floor(p * last) as u64));
    // Identical starting means would stay identical under EM.
    for k in 1..COMPONENTS {
        if means[k] <= means[k - 1] {
            means[k] = means[k - 1] + 0.5;
        }
    }
    let mean = hist.bins.iter().map(|&(v, c)| v * c).sum::<f64>() / hist.total;
    let var = hist.bins.iter().map(|&(v, c)| c * (v - mean) * (v - mean)).sum::<f64>() / hist.total;
    GaussianMixture1D {
        means,
        variances: [var.max(VARIANCE_FLOOR); COMPONENTS],
        weights: [1.0 / COMPONENTS as f64; COMPONENTS],
    }
}

/// Maximum-posterior cluster per pixel.
pub fn classify_pixels(img: &ByteImage, gmm: &GaussianMixture1D) -> LabelMask {
    let lut: [u8; 256] = core::array::from_fn(|v| gmm.classify(v as f64) as u8);
    let labels = img.values().iter().map(|&v| lut[v as usize]).collect();
    LabelMask::new(img.width(), img.height(), labels).expect("same dimensions as input")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarity {
    #[default]
    Highest,
    Lowest,
}

/// Indicator of the cluster with the highest (or lowest) mean.
pub fn select_foreground(mask: &LabelMask, gmm: &GaussianMixture1D, polarity: Polarity) -> BinaryMask {
    let mut target = 0;
    for k in 1..COMPONENTS {
        let better = match polarity {
            Polarity::Highest => gmm.means[k] > gmm.means[target],
            Polarity::Lowest => gmm.means[k] < gmm.means[target],
        };
        if better {
            target = k;
        }
    }
    let bits = mask.labels().iter().map(|&l| l as usize == target).collect();
    BinaryMask::new(mask.width(), mask.height(), bits).expect("same dimensions as input")
}

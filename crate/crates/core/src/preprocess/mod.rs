//! Segmentation stages: a-channel quantization and histogram equalization,
//! three-way Gaussian mixture clustering, binary morphology and region
//! extraction.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

mod equalize;
mod gmm;
mod morphology;
mod regions;

pub use equalize::{hist_equalize, quantize_plane};
pub use gmm::{classify_pixels, fit_gmm3, select_foreground, GaussianMixture1D, GmmFit, Polarity};
pub use morphology::{dilate, disk_offsets, erode, fill_holes, morph_open, remove_small_components};
pub use regions::{extract_rois, label_components, Roi};

/// 8-bit single-channel image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ByteImage {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl ByteImage {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions("image must be at least 1x1"));
        }
        if values.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                found: values.len(),
            });
        }
        Ok(Self { width, height, values })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn histogram(&self) -> [u64; 256] {
        let mut hist = [0u64; 256];
        for &v in &self.values {
            hist[v as usize] += 1;
        }
        hist
    }
}

/// Per-pixel cluster index from [`classify_pixels`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMask {
    width: usize,
    height: usize,
    labels: Vec<u8>,
}

impl LabelMask {
    pub fn new(width: usize, height: usize, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                found: labels.len(),
            });
        }
        Ok(Self { width, height, labels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }
}

/// Foreground/background mask, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions("mask must be at least 1x1"));
        }
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                found: bits.len(),
            });
        }
        Ok(Self { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True when every foreground pixel of `self` is foreground in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Intersection over union; two empty masks score 1.
    pub fn iou(&self, other: &BinaryMask) -> f64 {
        let mut inter = 0usize;
        let mut union = 0usize;
        for (&a, &b) in self.bits.iter().zip(&other.bits) {
            inter += usize::from(a && b);
            union += usize::from(a || b);
        }
        if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        }
    }
}

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// 8-bit RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions("image must be at least 1x1"));
        }
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                found: pixels.len(),
            });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        Self::new(width, height, vec![rgb; width * height])
    }

    /// Builds an image from interleaved `RGBRGB...` bytes.
    pub fn from_interleaved(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 3 * width * height {
            return Err(Error::DimensionMismatch {
                expected: 3 * width * height,
                found: bytes.len(),
            });
        }
        let pixels = bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Self::new(width, height, pixels)
    }

    pub fn to_interleaved(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }
}

/// Real-valued single-channel image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPlane {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarPlane {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions("plane must be at least 1x1"));
        }
        if values.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("plane values must be finite"));
        }
        Ok(Self { width, height, values })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Copy of the inclusive rectangle `[x0, x1] × [y0, y1]`.
    pub fn crop(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> Result<Self> {
        if x0 > x1 || y0 > y1 || x1 >= self.width || y1 >= self.height {
            return Err(Error::InvalidDimensions("crop rectangle outside plane"));
        }
        let w = x1 - x0 + 1;
        let mut values = Vec::with_capacity(w * (y1 - y0 + 1));
        for y in y0..=y1 {
            values.extend_from_slice(&self.values[y * self.width + x0..=y * self.width + x1]);
        }
        Ok(Self {
            width: w,
            height: y1 - y0 + 1,
            values,
        })
    }
}

//! Region covariance descriptors and Riemannian classifiers for
//! white-blood-cell microscopy.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the pure
//! algorithmic parts of the pipeline:
//!
//! - [`colorspace`]: RGB → XYZ → Lab conversion.
//! - [`preprocess`]: a-channel equalization, three-way Gaussian mixture
//!   clustering, binary morphology and region extraction.
//! - [`covdesc`]: per-pixel feature stacks and region covariance matrices,
//!   with a brute-force path and an integral-image path.
//! - [`spdgeom`]: affine-invariant geometry on symmetric positive-definite
//!   matrices (exp/log, distance, tangent maps, Fréchet mean).
//! - [`classify`]: minimum distance to Riemannian mean (MDRM), tangent-space
//!   LDA (TSLDA) and confusion-matrix evaluation.
//! - [`pipeline`]: the segmentation and descriptor chain that ties the above
//!   together for one image.
//!
//! File formats, the CLI and synthetic data generators live in the `leukocov`
//! companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod classify;
pub mod colorspace;
pub mod covdesc;
mod error;
pub mod linalg;
mod math;
pub mod pipeline;
pub mod preprocess;
pub mod raster;
pub mod spdgeom;

pub use error::{Error, Result};
pub use raster::{RasterImage, ScalarPlane};
pub use spdgeom::{SpdMatrix, SymMatrix, TangentVector};

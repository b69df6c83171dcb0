//! RGB → XYZ → Lab.
//!
//! The RGB → XYZ step uses the CIE RGB matrix scaled by `1 / 0.17697`; the
//! Lab step uses the D65 reference white. The two are not colorimetrically
//! consistent (white maps to L ≈ 190.6 with small positive a and b), which is
//! harmless here: only relative a-channel contrast is used downstream.

use alloc::vec::Vec;

use crate::math;
use crate::{RasterImage, ScalarPlane};

/// Reference white `(X₀, Y₀, Z₀)`.
pub const REFERENCE_WHITE: XyzTriple = XyzTriple {
    x: 95.047,
    y: 100.0,
    z: 108.883,
};

const RGB_TO_XYZ: [[f64; 3]; 3] = [[0.49, 0.31, 0.2], [0.17697, 0.8124, 0.01063], [0.0, 0.01, 0.99]];
const RGB_TO_XYZ_SCALE: f64 = 1.0 / 0.17697;
/// Unit-range RGB is stretched to `[0, 100]` so Y is commensurate with Y₀.
const RGB_INPUT_SCALE: f64 = 100.0;

const DELTA: f64 = 6.0 / 29.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyzTriple {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

/// Converts unit-range RGB (each channel in `[0, 1]`) to XYZ.
pub fn rgb_to_xyz(r: f64, g: f64, b: f64) -> XyzTriple {
    let rgb = [r * RGB_INPUT_SCALE, g * RGB_INPUT_SCALE, b * RGB_INPUT_SCALE];
    let row = |k: usize| {
        RGB_TO_XYZ_SCALE * (RGB_TO_XYZ[k][0] * rgb[0] + RGB_TO_XYZ[k][1] * rgb[1] + RGB_TO_XYZ[k][2] * rgb[2])
    };
    XyzTriple {
        x: row(0),
        y: row(1),
        z: row(2),
    }
}

/// Lab companding function: cube root above `(6/29)³`, linear below.
pub fn lab_f(t: f64) -> f64 {
    if t > DELTA * DELTA * DELTA {
        math::cbrt(t)
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

pub fn xyz_to_lab(xyz: XyzTriple) -> Lab {
    let fx = lab_f(xyz.x / REFERENCE_WHITE.x);
    let fy = lab_f(xyz.y / REFERENCE_WHITE.y);
    let fz = lab_f(xyz.z / REFERENCE_WHITE.z);
    Lab {
        l: 116.0 * fy - 16.0,
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    }
}

pub fn rgb8_to_lab(rgb: [u8; 3]) -> Lab {
    let unit = |c: u8| f64::from(c) / 255.0;
    xyz_to_lab(rgb_to_xyz(unit(rgb[0]), unit(rgb[1]), unit(rgb[2])))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabPlanes {
    pub l: ScalarPlane,
    pub a: ScalarPlane,
    pub b: ScalarPlane,
}

/// Per-pixel Lab conversion of an 8-bit image into three planes.
pub fn extract_lab_channels(img: &RasterImage) -> LabPlanes {
    let n = img.width() * img.height();
    let mut l = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for &px in img.pixels() {
        let lab = rgb8_to_lab(px);
        l.push(lab.l);
        a.push(lab.a);
        b.push(lab.b);
    }
    let plane = |v| ScalarPlane::new(img.width(), img.height(), v).expect("Lab of 8-bit input is finite");
    LabPlanes {
        l: plane(l),
        a: plane(a),
        b: plane(b),
    }
}

/// Only the a-channel, skipping the L and b planes.
pub fn extract_a_channel(img: &RasterImage) -> ScalarPlane {
    let values = img.pixels().iter().map(|&px| rgb8_to_lab(px).a).collect();
    ScalarPlane::new(img.width(), img.height(), values).expect("Lab of 8-bit input is finite")
}

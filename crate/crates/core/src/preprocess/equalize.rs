use alloc::vec::Vec;

use super::ByteImage;
use crate::math;
use crate::ScalarPlane;

/// Min-max rescale to `0..=255`, rounding half up. A constant plane maps to 0.
pub fn quantize_plane(plane: &ScalarPlane) -> ByteImage {
    let (lo, hi) = plane
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    let values: Vec<u8> = if span > 0.0 {
        plane
            .values()
            .iter()
            .map(|&v| math::floor((v - lo) / span * 255.0 + 0.5).clamp(0.0, 255.0) as u8)
            .collect()
    } else {
        alloc::vec![0; plane.values().len()]
    };
    ByteImage::new(plane.width(), plane.height(), values).expect("dimensions come from a valid plane")
}

/// Classic CDF histogram equalization:
/// `out(v) = round(255 · (cdf(v) − cdf_min) / (N − cdf_min))`, half up.
/// An image with a single distinct value is returned unchanged.
pub fn hist_equalize(img: &ByteImage) -> ByteImage {
    let hist = img.histogram();
    let total = img.values().len() as u64;
    let cdf_min = match hist.iter().find(|&&c| c > 0) {
        Some(&c) => c,
        None => return img.clone(),
    };
    if cdf_min == total {
        return img.clone();
    }
    let denom = total - cdf_min;
    let mut lut = [0u8; 256];
    let mut cdf = 0u64;
    for (v, &count) in hist.iter().enumerate() {
        cdf += count;
        if count == 0 {
            continue;
        }
        let num = 255 * (cdf - cdf_min);
        lut[v] = ((2 * num + denom) / (2 * denom)) as u8;
    }
    let values = img.values().iter().map(|&v| lut[v as usize]).collect();
    ByteImage::new(img.width(), img.height(), values).expect("same dimensions as input")
}

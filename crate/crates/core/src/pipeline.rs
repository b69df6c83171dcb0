//! Image → mask → descriptor for a single image.

use alloc::vec::Vec;

use crate::colorspace::{extract_a_channel, extract_lab_channels};
use crate::covdesc::{feature_map, region_covariance, region_covariance_fast, Feature};
use crate::preprocess::{
    classify_pixels, extract_rois, fill_holes, fit_gmm3, hist_equalize, morph_open, quantize_plane,
    remove_small_components, select_foreground, BinaryMask, GmmFit, Polarity, Roi,
};
use crate::{RasterImage, Result, ScalarPlane, SpdMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentParams {
    pub morph_radius: usize,
    pub min_area: usize,
    pub polarity: Polarity,
    pub gmm_tol: f64,
    pub gmm_max_iters: usize,
}

impl Default for SegmentParams {
    fn default() -> Self {
        Self {
            morph_radius: 2,
            min_area: 200,
            polarity: Polarity::Highest,
            gmm_tol: 1e-6,
            gmm_max_iters: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub gmm: GmmFit,
    /// Cleaned foreground: opened, small components removed, holes filled.
    pub mask: BinaryMask,
    /// Largest first; never empty (falls back to the whole image).
    pub rois: Vec<Roi>,
}

/// Segments an a-channel plane.
pub fn segment_plane(a: &ScalarPlane, params: &SegmentParams) -> Result<Segmentation> {
    let equalized = hist_equalize(&quantize_plane(a));
    let gmm = fit_gmm3(&equalized, params.gmm_max_iters, params.gmm_tol)?;
    let labels = classify_pixels(&equalized, &gmm.mixture);
    let fg = select_foreground(&labels, &gmm.mixture, params.polarity);
    let opened = morph_open(&fg, params.morph_radius);
    let mask = fill_holes(&remove_small_components(&opened, params.min_area));
    let rois = extract_rois(&mask, params.min_area);
    Ok(Segmentation { gmm, mask, rois })
}

pub fn segment(img: &RasterImage, params: &SegmentParams) -> Result<Segmentation> {
    segment_plane(&extract_a_channel(img), params)
}

/// Intensity plane the features are computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Channel {
    #[default]
    A,
    L,
}

/// Which pixels of the region enter the covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegionMode {
    /// Only the component's own pixels.
    #[default]
    Mask,
    /// The full bounding rectangle, via summed-area tables.
    BoundingBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorParams {
    pub features: Vec<Feature>,
    pub channel: Channel,
    pub region: RegionMode,
}

impl Default for DescriptorParams {
    fn default() -> Self {
        Self {
            features: Feature::ALL.to_vec(),
            channel: Channel::A,
            region: RegionMode::Mask,
        }
    }
}

/// Covariance descriptor of `roi` within `gray`.
///
/// Features are computed on the region's bounding box grown by one pixel
/// (clipped to the plane), so derivatives on the box edge see real
/// neighbors. Position features are relative to that window; covariance is
/// unaffected by the offset.
pub fn roi_descriptor(gray: &ScalarPlane, roi: &Roi, params: &DescriptorParams) -> Result<SpdMatrix> {
    let wx0 = roi.x0.saturating_sub(1);
    let wy0 = roi.y0.saturating_sub(1);
    let wx1 = (roi.x1 + 1).min(gray.width() - 1);
    let wy1 = (roi.y1 + 1).min(gray.height() - 1);
    let window = gray.crop(wx0, wy0, wx1, wy1)?;
    let stack = feature_map(&window, &params.features)?;
    let local = roi.translated(wx0, wy0);
    match params.region {
        RegionMode::Mask => region_covariance(&stack, &local),
        RegionMode::BoundingBox => region_covariance_fast(&stack, &local),
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineParams {
    pub segment: SegmentParams,
    pub descriptor: DescriptorParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Described {
    pub segmentation: Segmentation,
    pub descriptor: SpdMatrix,
}

/// Segments `img` and describes its largest region.
pub fn describe(img: &RasterImage, params: &PipelineParams) -> Result<Described> {
    let (a, gray) = match params.descriptor.channel {
        Channel::A => {
            let a = extract_a_channel(img);
            (a.clone(), a)
        }
        Channel::L => {
            let lab = extract_lab_channels(img);
            (lab.a, lab.l)
        }
    };
    let segmentation = segment_plane(&a, &params.segment)?;
    let descriptor = roi_descriptor(&gray, &segmentation.rois[0], &params.descriptor)?;
    Ok(Described {
        segmentation,
        descriptor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Magenta disk of radius 40 on a pale background with mild deterministic
    /// texture so the histogram has more than three levels.
    fn disk_image() -> (RasterImage, BinaryMask) {
        let (w, h) = (160, 120);
        let (cx, cy, r) = (70.0, 60.0, 40.0);
        let inside = |x: usize, y: usize| {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            dx * dx + dy * dy <= r * r
        };
        let mut px = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let jitter = ((x * 7 + y * 13) % 11) as u8;
                px.push(if inside(x, y) {
                    [150 + jitter, 40 + jitter, 150 + jitter]
                } else {
                    [225 + jitter, 215 + jitter, 210 + jitter]
                });
            }
        }
        let truth = BinaryMask::from_fn(w, h, inside).unwrap();
        (RasterImage::new(w, h, px).unwrap(), truth)
    }

    #[test]
    fn segments_single_disk() {
        let (img, truth) = disk_image();
        let seg = segment(&img, &SegmentParams::default()).unwrap();
        assert_eq!(seg.mask.width(), img.width());
        assert_eq!(seg.mask.height(), img.height());
        assert!(seg.mask.iou(&truth) >= 0.85, "iou {}", seg.mask.iou(&truth));
        assert_eq!(seg.rois.len(), 1);
    }

    #[test]
    fn uniform_image_is_degenerate() {
        let img = RasterImage::filled(20, 20, [200, 100, 50]).unwrap();
        assert!(matches!(
            segment(&img, &SegmentParams::default()),
            Err(crate::Error::DegenerateInput { .. })
        ));
    }

    #[test]
    fn descriptor_matches_direct_computation() {
        let gray = ScalarPlane::from_fn(30, 20, |x, y| ((x * x + 3 * y) % 17) as f64).unwrap();
        let roi = Roi::rect(5, 4, 20, 15);
        let params = DescriptorParams::default();
        let got = roi_descriptor(&gray, &roi, &params).unwrap();
        let full = feature_map(&gray, &params.features).unwrap();
        let want = region_covariance(&full, &roi).unwrap();
        assert!(got.matrix().sub(want.matrix()).frobenius_norm() <= 1e-10 * want.matrix().frobenius_norm());

        let fast = roi_descriptor(
            &gray,
            &roi,
            &DescriptorParams {
                region: RegionMode::BoundingBox,
                ..params
            },
        )
        .unwrap();
        assert!(fast.matrix().sub(want.matrix()).frobenius_norm() <= 1e-9 * want.matrix().frobenius_norm());
    }

    #[test]
    fn descriptor_is_translation_invariant() {
        let pattern = |x: usize, y: usize| ((x * 5 + y * y) % 13) as f64;
        let a = ScalarPlane::from_fn(40, 40, |x, y| pattern(x, y)).unwrap();
        let b = ScalarPlane::from_fn(40, 40, |x, y| pattern((x + 40 - 7) % 40, (y + 40 - 3) % 40)).unwrap();
        let mask: Vec<bool> = (0..100).map(|i| (i * 7) % 5 != 0).collect();
        let ra = Roi::with_mask(5, 5, 14, 14, mask.clone());
        let rb = Roi::with_mask(12, 8, 21, 17, mask);
        let p = DescriptorParams::default();
        let da = roi_descriptor(&a, &ra, &p).unwrap();
        let db = roi_descriptor(&b, &rb, &p).unwrap();
        assert!(da.matrix().sub(db.matrix()).max_abs() < 1e-9);
    }

    #[test]
    fn describe_uses_largest_region() {
        let (img, _) = disk_image();
        let d = describe(&img, &PipelineParams::default()).unwrap();
        assert_eq!(d.descriptor.n(), 9);
        let eight = PipelineParams {
            descriptor: DescriptorParams {
                features: Feature::ALL[..8].to_vec(),
                ..DescriptorParams::default()
            },
            ..PipelineParams::default()
        };
        assert_eq!(describe(&img, &eight).unwrap().descriptor.n(), 8);
    }
}

use alloc::vec;
use alloc::vec::Vec;

use super::morphology::remove_small_components;
use super::BinaryMask;

/// Bounding box and pixel statistics of one 8-connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub area: usize,
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

/// 8-connected component labeling. Label 0 is background; component `k`
/// (1-based, in raster order of first pixel) is described by `comps[k - 1]`.
pub fn label_components(mask: &BinaryMask) -> (Vec<u32>, Vec<Component>) {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = vec![0u32; w * h];
    let mut comps = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask.bits()[start] || labels[start] != 0 {
            continue;
        }
        let id = comps.len() as u32 + 1;
        let mut comp = Component {
            area: 0,
            x0: start % w,
            y0: start / w,
            x1: start % w,
            y1: start / w,
        };
        labels[start] = id;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            comp.area += 1;
            comp.x0 = comp.x0.min(x);
            comp.x1 = comp.x1.max(x);
            comp.y0 = comp.y0.min(y);
            comp.y1 = comp.y1.max(y);
            for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    let j = ny * w + nx;
                    if mask.bits()[j] && labels[j] == 0 {
                        labels[j] = id;
                        stack.push(j);
                    }
                }
            }
        }
        comps.push(comp);
    }
    (labels, comps)
}

/// A connected region: inclusive bounding box plus per-pixel membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roi {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
    pub area: usize,
    /// Row-major membership over the bounding box.
    mask: Vec<bool>,
}

impl Roi {
    /// A solid rectangle.
    pub fn rect(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        assert!(x0 <= x1 && y0 <= y1, "empty rectangle");
        let area = (x1 - x0 + 1) * (y1 - y0 + 1);
        Self {
            x0,
            y0,
            x1,
            y1,
            area,
            mask: vec![true; area],
        }
    }

    /// Region with explicit membership over the bounding box.
    pub fn with_mask(x0: usize, y0: usize, x1: usize, y1: usize, mask: Vec<bool>) -> Self {
        assert!(x0 <= x1 && y0 <= y1, "empty rectangle");
        assert_eq!(mask.len(), (x1 - x0 + 1) * (y1 - y0 + 1), "mask size");
        let area = mask.iter().filter(|&&b| b).count();
        Self {
            x0,
            y0,
            x1,
            y1,
            area,
            mask,
        }
    }

    pub fn box_width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    pub fn box_height(&self) -> usize {
        self.y1 - self.y0 + 1
    }

    pub fn box_area(&self) -> usize {
        self.box_width() * self.box_height()
    }

    /// Membership of absolute pixel `(x, y)`, which must lie in the box.
    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.mask[(y - self.y0) * self.box_width() + (x - self.x0)]
    }

    /// Same region with its bounding box moved to the origin.
    pub fn at_origin(&self) -> Self {
        self.translated(self.x0, self.y0)
    }

    /// Same region in a frame whose origin is absolute `(ox, oy)`.
    pub fn translated(&self, ox: usize, oy: usize) -> Self {
        Self {
            x0: self.x0 - ox,
            y0: self.y0 - oy,
            x1: self.x1 - ox,
            y1: self.y1 - oy,
            area: self.area,
            mask: self.mask.clone(),
        }
    }

    /// The bounding rectangle with the mask dropped.
    pub fn bounding_rect(&self) -> Self {
        Self::rect(self.x0, self.y0, self.x1, self.y1)
    }

    /// Paints the region into a full-size mask.
    pub fn to_mask(&self, width: usize, height: usize) -> BinaryMask {
        BinaryMask::from_fn(width, height, |x, y| {
            x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1 && self.contains(x, y)
        })
        .expect("nonempty dimensions")
    }
}

/// One region per 8-connected component of at least `min_area` pixels,
/// largest first (ties by `(y0, x0)`). When nothing survives, a single region
/// covering the whole image is returned.
pub fn extract_rois(mask: &BinaryMask, min_area: usize) -> Vec<Roi> {
    let cleaned = remove_small_components(mask, min_area);
    let (labels, comps) = label_components(&cleaned);
    let w = mask.width();
    let mut rois: Vec<Roi> = comps
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let id = k as u32 + 1;
            let mut member = Vec::with_capacity((c.x1 - c.x0 + 1) * (c.y1 - c.y0 + 1));
            for y in c.y0..=c.y1 {
                for x in c.x0..=c.x1 {
                    member.push(labels[y * w + x] == id);
                }
            }
            Roi::with_mask(c.x0, c.y0, c.x1, c.y1, member)
        })
        .collect();
    rois.sort_by(|a, b| b.area.cmp(&a.area).then((a.y0, a.x0).cmp(&(b.y0, b.x0))));
    if rois.is_empty() {
        rois.push(Roi::rect(0, 0, mask.width() - 1, mask.height() - 1));
    }
    rois
}

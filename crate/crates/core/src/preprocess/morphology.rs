use alloc::vec::Vec;

use super::regions::label_components;
use super::BinaryMask;

/// Offsets of the discrete disk `{(dx, dy) : dx² + dy² ≤ r²}`.
pub fn disk_offsets(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Binary erosion by a disk; out-of-bounds neighbors count as background.
pub fn erode(mask: &BinaryMask, radius: usize) -> BinaryMask {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let offsets = disk_offsets(radius);
    let r = radius as isize;
    BinaryMask::from_fn(mask.width(), mask.height(), |x, y| {
        let (x, y) = (x as isize, y as isize);
        if !mask.get(x as usize, y as usize) || x < r || y < r || x + r >= w || y + r >= h {
            // Every disk reaches distance r along both axes.
            return mask.get(x as usize, y as usize) && radius == 0;
        }
        offsets
            .iter()
            .all(|&(dx, dy)| mask.get((x + dx) as usize, (y + dy) as usize))
    })
    .expect("same dimensions as input")
}

/// Binary dilation by a disk; out-of-bounds neighbors are ignored.
pub fn dilate(mask: &BinaryMask, radius: usize) -> BinaryMask {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let mut out = mask.clone();
    let offsets = disk_offsets(radius);
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x as usize, y as usize) {
                continue;
            }
            for &(dx, dy) in &offsets {
                let (nx, ny) = (x + dx, y + dy);
                if nx >= 0 && ny >= 0 && nx < w && ny < h {
                    out.set(nx as usize, ny as usize, true);
                }
            }
        }
    }
    out
}

/// Opening: erosion followed by dilation with the same disk. Radius 0 is
/// the identity.
pub fn morph_open(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    dilate(&erode(mask, radius), radius)
}

/// Clears 8-connected components smaller than `min_area` pixels.
pub fn remove_small_components(mask: &BinaryMask, min_area: usize) -> BinaryMask {
    if min_area == 0 {
        return mask.clone();
    }
    let (labels, comps) = label_components(mask);
    let bits = labels
        .iter()
        .map(|&l| l != 0 && comps[l as usize - 1].area >= min_area)
        .collect();
    BinaryMask::new(mask.width(), mask.height(), bits).expect("same dimensions as input")
}

/// Turns background pixels that are not 4-connected to the image border
/// into foreground.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let mut outside = alloc::vec![false; w * h];
    let mut stack = Vec::new();
    let seed = |x: usize, y: usize, outside: &mut Vec<bool>, stack: &mut Vec<(usize, usize)>| {
        let i = y * w + x;
        if !mask.bits()[i] && !outside[i] {
            outside[i] = true;
            stack.push((x, y));
        }
    };
    for x in 0..w {
        seed(x, 0, &mut outside, &mut stack);
        seed(x, h - 1, &mut outside, &mut stack);
    }
    for y in 0..h {
        seed(0, y, &mut outside, &mut stack);
        seed(w - 1, y, &mut outside, &mut stack);
    }
    while let Some((x, y)) = stack.pop() {
        if x > 0 {
            seed(x - 1, y, &mut outside, &mut stack);
        }
        if x + 1 < w {
            seed(x + 1, y, &mut outside, &mut stack);
        }
        if y > 0 {
            seed(x, y - 1, &mut outside, &mut stack);
        }
        if y + 1 < h {
            seed(x, y + 1, &mut outside, &mut stack);
        }
    }
    let bits = outside.iter().map(|&o| !o).collect();
    BinaryMask::new(w, h, bits).expect("same dimensions as input")
}

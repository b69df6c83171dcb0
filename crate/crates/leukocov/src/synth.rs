//! Seeded synthetic data: SPD class clouds and single-cell microscopy-like
//! images with known masks.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use leukocov_core::classify::LabeledSample;
use leukocov_core::preprocess::BinaryMask;
use leukocov_core::spdgeom::{riemann_distance, spd_exp, tangent_dim, unupper_vec};
use leukocov_core::{RasterImage, SpdMatrix, TangentVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{AppError, Result};
use crate::imageio::write_image;

#[derive(Debug, Clone, PartialEq)]
pub struct SpdCloudSpec {
    pub n: usize,
    pub classes: usize,
    pub per_class: usize,
    /// Tangent norm of each class mean's offset from the identity.
    pub mean_radius: f64,
    /// Minimum pairwise Riemannian distance between class means.
    pub min_separation: f64,
    /// Standard deviation of each whitened tangent coordinate.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SpdCloudSpec {
    fn default() -> Self {
        Self {
            n: 9,
            classes: 5,
            per_class: 60,
            mean_radius: 2.0,
            min_separation: 2.0,
            noise: 0.3,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpdCloud {
    pub means: Vec<SpdMatrix>,
    /// Class by class, `per_class` samples each.
    pub samples: Vec<LabeledSample>,
}

fn gaussian_tangent(rng: &mut ChaCha8Rng, n: usize, sd: f64) -> TangentVector {
    TangentVector::new(
        (0..tangent_dim(n))
            .map(|_| sd * Distribution::<f64>::sample(&StandardNormal, rng))
            .collect(),
    )
}

/// Class means `exp(S_c)` with `‖S_c‖_F = mean_radius` in random directions,
/// redrawn until every pair is at least `min_separation` apart. Samples are
/// `G^{1/2} exp(E) G^{1/2}` with `upper(E)` isotropic Gaussian, so their
/// whitened tangent coordinates at `G` are exactly the drawn noise.
pub fn spd_cloud(spec: &SpdCloudSpec) -> Result<SpdCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let core = |e| AppError::core("synthetic SPD data", e);
    let mut means: Vec<SpdMatrix> = Vec::with_capacity(spec.classes);
    let mut attempts = 0;
    while means.len() < spec.classes {
        attempts += 1;
        if attempts > 10_000 {
            return Err(AppError::Usage(
                "cannot place class means at the requested separation".into(),
            ));
        }
        let dir = gaussian_tangent(&mut rng, spec.n, 1.0);
        let scaled = TangentVector::new(dir.values().iter().map(|v| v * spec.mean_radius / dir.norm()).collect());
        let g = spd_exp(&unupper_vec(&scaled, spec.n).map_err(core)?);
        let far = means
            .iter()
            .map(|m| riemann_distance(m, &g))
            .collect::<leukocov_core::Result<Vec<_>>>()
            .map_err(core)?
            .into_iter()
            .all(|d| d >= spec.min_separation);
        if far {
            means.push(g);
        }
    }
    let mut samples = Vec::with_capacity(spec.classes * spec.per_class);
    for (c, g) in means.iter().enumerate() {
        let root = g.powf(0.5).map_err(core)?;
        for _ in 0..spec.per_class {
            let e = unupper_vec(&gaussian_tangent(&mut rng, spec.n, spec.noise), spec.n).map_err(core)?;
            let p = spd_exp(&e).congruence(root.matrix()).map_err(core)?;
            samples.push(LabeledSample::new(p, c));
        }
    }
    Ok(SpdCloud { means, samples })
}

/// Plasma colors sharing one a-channel value (to within 0.002) across a
/// spread of lightness.
const PLASMA: [[u8; 3]; 6] = [
    [200, 196, 211],
    [214, 201, 201],
    [209, 210, 233],
    [226, 215, 218],
    [232, 226, 237],
    [244, 237, 246],
];

/// Red-cell and cytoplasm colors, likewise iso-a.
const PINK: [[u8; 3]; 6] = [
    [176, 149, 186],
    [177, 159, 213],
    [183, 168, 229],
    [199, 169, 206],
    [198, 173, 219],
    [220, 188, 226],
];

/// Nucleus endpoints: texture value 0 is the darkest (highest a).
const NUCLEUS_DARK: [f64; 3] = [90.0, 20.0, 110.0];
const NUCLEUS_LIGHT: [f64; 3] = [160.0, 80.0, 170.0];

/// Number of nucleus texture classes.
pub const TEXTURE_CLASSES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    pub width: usize,
    pub height: usize,
}

impl Default for CellSpec {
    fn default() -> Self {
        Self {
            width: 720,
            height: 576,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CellImage {
    pub image: RasterImage,
    /// Ground-truth nucleus.
    pub nucleus: BinaryMask,
    pub class: usize,
}

/// Smooth random field in roughly `[-1, 1]`: a sum of three plane waves.
struct Waves {
    k: [(f64, f64, f64); 3],
}

impl Waves {
    fn new(rng: &mut ChaCha8Rng, period: (f64, f64)) -> Self {
        let k = core::array::from_fn(|_| {
            let theta = rng.random_range(0.0..PI);
            let w = 2.0 * PI / rng.random_range(period.0..period.1);
            (w * theta.cos(), w * theta.sin(), rng.random_range(0.0..2.0 * PI))
        });
        Self { k }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        self.k
            .iter()
            .map(|(kx, ky, ph)| (kx * x + ky * y + ph).sin())
            .sum::<f64>()
            / 3.0
    }
}

/// Texture value at `(x, y)`; may draw from the generator.
type Texture = Box<dyn Fn(f64, f64, &mut ChaCha8Rng) -> f64>;

/// Nucleus texture in `[0, 1]` for each class:
///
/// 0. vertical stripes, period 7–9 px
/// 1. horizontal stripes, period 7–9 px
/// 2. fine white noise
/// 3. smooth blobs, period 35–55 px
/// 4. diagonal stripes, period 10–14 px
fn nucleus_texture(class: usize, rng: &mut ChaCha8Rng) -> Texture {
    let phase = rng.random_range(0.0..2.0 * PI);
    match class % TEXTURE_CLASSES {
        0 => {
            let w = 2.0 * PI / rng.random_range(7.0..9.0);
            Box::new(move |x, _, _| 0.5 + 0.45 * (w * x + phase).sin())
        }
        1 => {
            let w = 2.0 * PI / rng.random_range(7.0..9.0);
            Box::new(move |_, y, _| 0.5 + 0.45 * (w * y + phase).sin())
        }
        2 => Box::new(|_, _, r| r.random_range(0.05..0.95)),
        3 => {
            let waves = Waves::new(rng, (35.0, 55.0));
            Box::new(move |x, y, _| 0.5 + 0.45 * waves.at(x, y))
        }
        _ => {
            let w = 2.0 * PI / rng.random_range(10.0..14.0) / std::f64::consts::SQRT_2;
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            Box::new(move |x, y, _| 0.5 + 0.45 * (w * (x + sign * y) + phase).sin())
        }
    }
}

fn palette_pick(palette: &[[u8; 3]; 6], field: f64, rng: &mut ChaCha8Rng) -> [u8; 3] {
    let base = ((field + 1.0) * 0.5 * 5.999).clamp(0.0, 5.999) as i64;
    let jitter = rng.random_range(-1..=1);
    palette[(base + jitter).clamp(0, 5) as usize]
}

/// Fraction of the image the red cells aim to cover.
const RED_CELL_COVER: (f64, f64) = (0.45, 0.55);

/// Red cells: disks that stay clear of the leukocyte, rasterized until the
/// target coverage is reached or placement attempts run out.
fn red_cells(w: usize, h: usize, keep_out: (f64, f64, f64), scale: f64, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut cover = vec![false; w * h];
    let target = (rng.random_range(RED_CELL_COVER.0..RED_CELL_COVER.1) * (w * h) as f64) as usize;
    let mut covered = 0;
    let (kx, ky, kr) = keep_out;
    for _ in 0..2000 {
        if covered >= target {
            break;
        }
        let r = rng.random_range(30.0..42.0) * scale;
        let cx = rng.random_range(-r..w as f64 + r);
        let cy = rng.random_range(-r..h as f64 + r);
        if (cx - kx).hypot(cy - ky) < kr + r + 4.0 {
            continue;
        }
        let y0 = (cy - r).floor().max(0.0) as usize;
        let y1 = ((cy + r).ceil().max(0.0) as usize).min(h - 1);
        let x0 = (cx - r).floor().max(0.0) as usize;
        let x1 = ((cx + r).ceil().max(0.0) as usize).min(w - 1);
        for y in y0..=y1 {
            for x in x0..=x1 {
                if (x as f64 - cx).hypot(y as f64 - cy) <= r && !cover[y * w + x] {
                    cover[y * w + x] = true;
                    covered += 1;
                }
            }
        }
    }
    cover
}

/// Renders one image: an elliptical nucleus of the class texture inside an
/// elliptical cytoplasm, among red cells on pale plasma. The nucleus is the
/// only region whose a-channel varies; plasma keeps one a value, red cells
/// and cytoplasm share a higher one.
pub fn render_cell(spec: CellSpec, class: usize, rng: &mut ChaCha8Rng) -> CellImage {
    let (w, h) = (spec.width, spec.height);
    let scale = (w.min(h) as f64) / 576.0;
    let ra = rng.random_range(70.0..110.0) * scale;
    let rb = rng.random_range(55.0..85.0) * scale;
    let ring = rng.random_range(1.35..1.6);
    let reach = ra * ring + 4.0;
    let cx = rng.random_range(reach..(w as f64 - reach).max(reach + 1.0));
    let cy = rng.random_range(reach..(h as f64 - reach).max(reach + 1.0));
    let theta = rng.random_range(0.0..PI);
    let (ct, st) = (theta.cos(), theta.sin());
    let bg_field = Waves::new(rng, (30.0, 90.0));
    let cyto_field = Waves::new(rng, (12.0, 30.0));
    let texture = nucleus_texture(class, rng);
    let rbc = red_cells(w, h, (cx, cy, reach), scale, rng);

    let mut pixels = Vec::with_capacity(w * h);
    let mut truth = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let (fx, fy) = (x as f64, y as f64);
            let (dx, dy) = (fx - cx, fy - cy);
            let u = (dx * ct + dy * st) / ra;
            let v = (-dx * st + dy * ct) / rb;
            let r2 = u * u + v * v;
            let in_nucleus = r2 <= 1.0;
            truth.push(in_nucleus);
            let px = if in_nucleus {
                let t = texture(fx, fy, rng).clamp(0.0, 1.0);
                core::array::from_fn(|k| {
                    let c = NUCLEUS_DARK[k] + t * (NUCLEUS_LIGHT[k] - NUCLEUS_DARK[k]);
                    let noise: f64 = 2.0 * Distribution::<f64>::sample(&StandardNormal, rng);
                    (c + noise).round().clamp(0.0, 255.0) as u8
                })
            } else if r2 <= ring * ring {
                palette_pick(&PINK, cyto_field.at(fx, fy), rng)
            } else if rbc[y * w + x] {
                palette_pick(&PINK, bg_field.at(fx, fy), rng)
            } else {
                palette_pick(&PLASMA, bg_field.at(fx, fy), rng)
            };
            pixels.push(px);
        }
    }
    CellImage {
        image: RasterImage::new(w, h, pixels).expect("sized to spec"),
        nucleus: BinaryMask::new(w, h, truth).expect("sized to spec"),
        class,
    }
}

/// Per-image generator: stream `class · 2³² + index` of a `ChaCha8Rng`
/// seeded with `seed`, so any image can be regenerated alone.
pub fn cell_rng(seed: u64, class: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((class as u64) << 32) | index as u64);
    rng
}

/// `per_class` images for each of `classes` textures, class by class.
pub fn cell_dataset(spec: CellSpec, classes: usize, per_class: usize, seed: u64) -> Vec<CellImage> {
    (0..classes)
        .flat_map(|c| (0..per_class).map(move |i| (c, i)))
        .map(|(c, i)| render_cell(spec, c, &mut cell_rng(seed, c, i)))
        .collect()
}

pub fn class_dir_name(class: usize) -> String {
    format!("texture{class}")
}

/// Writes a class-per-directory PPM dataset under `root`, plus each
/// nucleus mask as `masks/<class>/<name>.pgm`.
pub fn write_cell_dataset(root: &Path, spec: CellSpec, classes: usize, per_class: usize, seed: u64) -> Result<()> {
    for c in 0..classes {
        let dir = root.join(class_dir_name(c));
        let mask_dir = root.join("masks").join(class_dir_name(c));
        fs::create_dir_all(&dir).map_err(|e| AppError::io(&dir, e))?;
        fs::create_dir_all(&mask_dir).map_err(|e| AppError::io(&mask_dir, e))?;
        for i in 0..per_class {
            let cell = render_cell(spec, c, &mut cell_rng(seed, c, i));
            write_image(&dir.join(format!("{i:04}.ppm")), &cell.image)?;
            crate::imageio::write_mask(&mask_dir.join(format!("{i:04}.pgm")), &cell.nucleus)?;
        }
    }
    Ok(())
}

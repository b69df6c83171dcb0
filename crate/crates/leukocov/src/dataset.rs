//! Class-per-directory datasets and the seeded stratified split.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{AppError, Result};

const IMAGE_EXTENSIONS: [&str; 3] = ["ppm", "pnm", "png"];

/// Classes are the subdirectories of `root` in byte-wise name order; each
/// class lists its image files in the same order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub root: PathBuf,
    pub classes: Vec<String>,
    pub files: Vec<Vec<PathBuf>>,
}

impl Manifest {
    pub fn scan(root: &Path) -> Result<Self> {
        let mut classes = Vec::new();
        for entry in fs::read_dir(root).map_err(|e| AppError::io(root, e))? {
            let entry = entry.map_err(|e| AppError::io(root, e))?;
            if entry.file_type().map_err(|e| AppError::io(&entry.path(), e))?.is_dir() {
                let name = entry.file_name().into_string().map_err(|n| {
                    AppError::Data(format!("class directory name is not UTF-8: {}", n.to_string_lossy()))
                })?;
                classes.push(name);
            }
        }
        classes.sort();
        if classes.len() < 2 {
            return Err(AppError::Data(format!(
                "{}: need at least 2 class directories, found {}",
                root.display(),
                classes.len()
            )));
        }
        let mut files = Vec::with_capacity(classes.len());
        for class in &classes {
            let dir = root.join(class);
            let mut list = Vec::new();
            for entry in fs::read_dir(&dir).map_err(|e| AppError::io(&dir, e))? {
                let path = entry.map_err(|e| AppError::io(&dir, e))?.path();
                let is_image = path
                    .extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| e.eq_ignore_ascii_case(x)));
                if is_image && path.is_file() {
                    list.push(path);
                }
            }
            list.sort();
            files.push(list);
        }
        Ok(Self {
            root: root.to_path_buf(),
            classes,
            files,
        })
    }

    pub fn counts(&self) -> Vec<usize> {
        self.files.iter().map(Vec::len).collect()
    }

    /// `(class, path)` for every image, class by class.
    pub fn entries(&self) -> impl Iterator<Item = (usize, &Path)> {
        self.files
            .iter()
            .enumerate()
            .flat_map(|(c, fs)| fs.iter().map(move |p| (c, p.as_path())))
    }
}

/// Indices `(class, index within class)` of each portion, in class order and
/// ascending index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<(usize, usize)>,
    pub test: Vec<(usize, usize)>,
}

/// Per-class random split.
///
/// A single `ChaCha8Rng` (rand_chacha, `seed_from_u64(seed)`) visits the
/// classes in order; for each class it shuffles `0..count` with rand's
/// `SliceRandom::shuffle`, and the first `round(ratio · count)` indices
/// (clamped to `[1, count − 1]` when `count ≥ 2`) go to training.
pub fn stratified_split(counts: &[usize], ratio: f64, seed: u64) -> Split {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (c, &count) in counts.iter().enumerate() {
        let mut idx: Vec<usize> = (0..count).collect();
        idx.shuffle(&mut rng);
        let mut n_train = (ratio * count as f64).round() as usize;
        if count >= 2 {
            n_train = n_train.clamp(1, count - 1);
        } else {
            n_train = count;
        }
        let (tr, te) = idx.split_at_mut(n_train);
        tr.sort_unstable();
        te.sort_unstable();
        train.extend(tr.iter().map(|&i| (c, i)));
        test.extend(te.iter().map(|&i| (c, i)));
    }
    Split { train, test }
}

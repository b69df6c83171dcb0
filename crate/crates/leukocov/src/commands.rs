//! The CLI subcommands, writing human-readable output to `out`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use leukocov_core::classify::Classifier;
use leukocov_core::pipeline::segment as segment_image;

use crate::config::PipelineConfig;
use crate::dataset::Manifest;
use crate::error::{AppError, CoreContext, Result};
use crate::imageio::{read_image, write_mask};
use crate::model_io::{Model, SavedModel};
use crate::synth::{write_cell_dataset, CellSpec};
use crate::workflow::{
    check_compatible, confusion_csv, describe_image, describe_manifest, evaluate_split, format_table, split_for,
    train_model,
};

/// Configuration file plus an optional seed override.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Settings {
    pub fn load(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::load_or_default(self.config.as_deref())?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| AppError::io(Path::new("<stdout>"), e))
}

pub fn segment(input: &Path, output: &Path, settings: &Settings, out: &mut dyn Write) -> Result<()> {
    let cfg = settings.load()?;
    let img = read_image(input)?;
    let seg = segment_image(&img, &cfg.pipeline_params().segment).context(|| input.display().to_string())?;
    write_mask(output, &seg.mask)?;
    let mut text = format!("regions: {}\n", seg.rois.len());
    for (i, r) in seg.rois.iter().enumerate() {
        text += &format!(
            "region {i}: area {} box ({}, {})-({}, {})\n",
            r.area, r.x0, r.y0, r.x1, r.y1
        );
    }
    emit(out, &text)
}

pub fn train(dataset: &Path, model_path: &Path, settings: &Settings, out: &mut dyn Write) -> Result<()> {
    let cfg = settings.load()?;
    let manifest = Manifest::scan(dataset)?;
    let descriptors = describe_manifest(&manifest, &cfg)?;
    let split = split_for(&descriptors, &cfg);
    let model = train_model(&manifest.classes, &descriptors, &split, &cfg)?;
    model.save(model_path)?;
    let mut text = format!("{} model written to {}\n", model.model.kind(), model_path.display());
    for (c, name) in manifest.classes.iter().enumerate() {
        let n = split.train.iter().filter(|x| x.0 == c).count();
        text += &format!("train {name}: {n}\n");
    }
    emit(out, &text)
}

pub fn eval(
    dataset: &Path,
    model_path: &Path,
    csv: Option<&Path>,
    settings: &Settings,
    out: &mut dyn Write,
) -> Result<()> {
    let cfg = settings.load()?;
    let model = SavedModel::load(model_path)?;
    check_compatible(&model, None, &cfg)?;
    let manifest = Manifest::scan(dataset)?;
    check_compatible(&model, Some(&manifest.classes), &cfg)?;
    let descriptors = describe_manifest(&manifest, &cfg)?;
    let split = split_for(&descriptors, &cfg);
    let cm = evaluate_split(&model, &descriptors, &split)?;
    let csv_path = csv.map_or_else(|| default_csv_path(model_path), Path::to_path_buf);
    fs::write(&csv_path, confusion_csv(&cm, &model.class_names)).map_err(|e| AppError::io(&csv_path, e))?;
    emit(out, &format_table(&cm, &model.class_names))?;
    emit(out, &format!("confusion CSV written to {}\n", csv_path.display()))
}

/// `<model>.confusion.csv` next to the model file.
pub fn default_csv_path(model_path: &Path) -> PathBuf {
    let mut name = model_path.file_name().unwrap_or_default().to_os_string();
    name.push(".confusion.csv");
    model_path.with_file_name(name)
}

pub fn predict(image: &Path, model_path: &Path, settings: &Settings, out: &mut dyn Write) -> Result<()> {
    let cfg = settings.load()?;
    let model = SavedModel::load(model_path)?;
    check_compatible(&model, None, &cfg)?;
    let img = read_image(image)?;
    let p = describe_image(&img, &cfg).context(|| image.display().to_string())?;
    let (label, values) = match &model.model {
        Model::Mdrm(m) => ("distance", m.distances(&p)),
        Model::Tslda(m) => ("score", m.scores(&p)),
    };
    let values = values.context(|| image.display().to_string())?;
    let class = model.model.predict(&p).context(|| image.display().to_string())?;
    let mut text = format!("predicted: {}\n", model.class_names[class]);
    for (name, v) in model.class_names.iter().zip(&values) {
        text += &format!("{label} {name}: {v:.6}\n");
    }
    emit(out, &text)
}

pub fn synth(
    root: &Path,
    spec: CellSpec,
    classes: usize,
    per_class: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<()> {
    if classes < 2 || per_class < 2 {
        return Err(AppError::Usage("need at least 2 classes and 2 images per class".into()));
    }
    write_cell_dataset(root, spec, classes, per_class, seed)?;
    emit(
        out,
        &format!(
            "wrote {} images ({classes} classes) to {}; nucleus masks under {}\n",
            classes * per_class,
            root.display(),
            root.join("masks").display()
        ),
    )
}

//! Dataset-level steps shared by the commands: describe every image, split,
//! train, evaluate, and report.

use std::fmt::Write as _;

use leukocov_core::classify::{evaluate, ConfusionMatrix, LabeledSample, MdrmModel, TsldaModel};
use leukocov_core::pipeline::describe;
use leukocov_core::{RasterImage, SpdMatrix};

use crate::config::{ClassifierKind, PipelineConfig};
use crate::dataset::{stratified_split, Manifest, Split};
use crate::error::{AppError, CoreContext, Result};
use crate::imageio::read_image;
use crate::model_io::{Model, SavedModel};

/// Descriptor of one image's largest region.
pub fn describe_image(img: &RasterImage, cfg: &PipelineConfig) -> leukocov_core::Result<SpdMatrix> {
    describe(img, &cfg.pipeline_params()).map(|d| d.descriptor)
}

/// Descriptors for every manifest image, indexed `[class][file]`.
pub fn describe_manifest(manifest: &Manifest, cfg: &PipelineConfig) -> Result<Vec<Vec<SpdMatrix>>> {
    manifest
        .files
        .iter()
        .map(|files| {
            files
                .iter()
                .map(|path| {
                    let img = read_image(path)?;
                    describe_image(&img, cfg).context(|| path.display().to_string())
                })
                .collect()
        })
        .collect()
}

pub fn split_for(descriptors: &[Vec<SpdMatrix>], cfg: &PipelineConfig) -> Split {
    let counts: Vec<usize> = descriptors.iter().map(Vec::len).collect();
    stratified_split(&counts, cfg.split_ratio, cfg.seed)
}

pub fn samples(descriptors: &[Vec<SpdMatrix>], picks: &[(usize, usize)]) -> Vec<LabeledSample> {
    picks
        .iter()
        .map(|&(c, i)| LabeledSample::new(descriptors[c][i].clone(), c))
        .collect()
}

pub fn train_model(
    class_names: &[String],
    descriptors: &[Vec<SpdMatrix>],
    split: &Split,
    cfg: &PipelineConfig,
) -> Result<SavedModel> {
    let train = samples(descriptors, &split.train);
    let classes = class_names.len();
    let model = match cfg.classifier {
        ClassifierKind::Mdrm => {
            Model::Mdrm(MdrmModel::train(&train, classes, cfg.mean_params()).context(|| "training MDRM".into())?)
        }
        ClassifierKind::Tslda => Model::Tslda(
            TsldaModel::train(&train, classes, cfg.gamma, cfg.mean_params()).context(|| "training TSLDA".into())?,
        ),
    };
    Ok(SavedModel {
        class_names: class_names.to_vec(),
        model,
    })
}

pub fn evaluate_split(model: &SavedModel, descriptors: &[Vec<SpdMatrix>], split: &Split) -> Result<ConfusionMatrix> {
    let test = samples(descriptors, &split.test);
    if test.is_empty() {
        return Err(AppError::Data("held-out split is empty".into()));
    }
    evaluate(&model.model, &test).context(|| "evaluating held-out split".into())
}

/// Fails unless the model was trained on the same classes, in the same
/// order, and with descriptors of the configured size.
pub fn check_compatible(model: &SavedModel, class_names: Option<&[String]>, cfg: &PipelineConfig) -> Result<()> {
    use leukocov_core::classify::Classifier;
    let n = model.model.dim();
    if n != cfg.descriptor_dim() {
        return Err(AppError::core(
            format!(
                "model expects {n}x{n} descriptors but the configuration selects {} features",
                cfg.descriptor_dim()
            ),
            leukocov_core::Error::DimensionMismatch {
                expected: n,
                found: cfg.descriptor_dim(),
            },
        ));
    }
    if let Some(names) = class_names {
        if names != model.class_names.as_slice() {
            return Err(AppError::Data(format!(
                "dataset classes {names:?} differ from model classes {:?}",
                model.class_names
            )));
        }
    }
    Ok(())
}

fn percent(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_owned(), |v| format!("{:.2}%", 100.0 * v))
}

/// Counts with a per-class accuracy column and an overall line.
pub fn format_table(cm: &ConfusionMatrix, names: &[String]) -> String {
    let label_w = names
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("true \\ predicted".len());
    let col_w = names.iter().map(String::len).max().unwrap_or(0).max(6);
    let mut out = String::new();
    write!(out, "{:<label_w$}", "true \\ predicted").unwrap();
    for n in names {
        write!(out, "  {n:>col_w$}").unwrap();
    }
    writeln!(out, "  {:>8}", "accuracy").unwrap();
    for (t, name) in names.iter().enumerate() {
        write!(out, "{name:<label_w$}").unwrap();
        for p in 0..names.len() {
            write!(out, "  {:>col_w$}", cm.count(t, p)).unwrap();
        }
        writeln!(out, "  {:>8}", percent(cm.class_accuracy(t))).unwrap();
    }
    writeln!(
        out,
        "overall accuracy: {} ({}/{})",
        percent(cm.overall_accuracy()),
        cm.correct(),
        cm.total()
    )
    .unwrap();
    out
}

/// `true_class,<class>...` header, then one row of counts per true class.
pub fn confusion_csv(cm: &ConfusionMatrix, names: &[String]) -> String {
    let mut out = String::from("true_class");
    for n in names {
        write!(out, ",{n}").unwrap();
    }
    out.push('\n');
    for (t, name) in names.iter().enumerate() {
        out.push_str(name);
        for &c in cm.row(t) {
            write!(out, ",{c}").unwrap();
        }
        out.push('\n');
    }
    out
}

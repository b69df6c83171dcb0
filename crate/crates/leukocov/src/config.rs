//! Pipeline configuration, loaded from TOML. Every key is optional; unknown
//! keys are rejected.
//!
//! ```toml
//! features = ["x", "y", "ix", "iy", "grad", "ixx", "ixy", "iyy", "angle"]
//! channel = "a"            # or "l"
//! region = "mask"          # or "bbox"
//! morph_radius = 2
//! min_area = 200
//! polarity = "highest"     # or "lowest"
//! gmm_tol = 1e-6
//! gmm_max_iters = 100
//! mean_eps = 1e-8
//! mean_max_iters = 50
//! gamma = 0.1
//! split_ratio = 0.7
//! seed = 42
//! classifier = "tslda"     # or "mdrm"
//! ```

use std::fs;
use std::path::Path;

use leukocov_core::covdesc::Feature;
use leukocov_core::pipeline::{Channel, DescriptorParams, PipelineParams, RegionMode, SegmentParams};
use leukocov_core::preprocess::Polarity;
use leukocov_core::spdgeom::MeanParams;
use serde::Deserialize;

use crate::error::{AppError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    #[default]
    Tslda,
    Mdrm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ChannelName {
    #[default]
    A,
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RegionName {
    #[default]
    Mask,
    Bbox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PolarityName {
    #[default]
    Highest,
    Lowest,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub features: Vec<String>,
    pub channel: ChannelName,
    pub region: RegionName,
    pub morph_radius: usize,
    pub min_area: usize,
    pub polarity: PolarityName,
    pub gmm_tol: f64,
    pub gmm_max_iters: usize,
    pub mean_eps: f64,
    pub mean_max_iters: usize,
    pub gamma: f64,
    pub split_ratio: f64,
    pub seed: u64,
    pub classifier: ClassifierKind,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            features: Feature::ALL.iter().map(|f| f.name().to_owned()).collect(),
            channel: ChannelName::A,
            region: RegionName::Mask,
            morph_radius: 2,
            min_area: 200,
            polarity: PolarityName::Highest,
            gmm_tol: 1e-6,
            gmm_max_iters: 100,
            mean_eps: 1e-8,
            mean_max_iters: 50,
            gamma: 0.1,
            split_ratio: 0.7,
            seed: 42,
            classifier: ClassifierKind::Tslda,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        let cfg: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::from_toml(&text).map_err(|m| AppError::Usage(format!("{}: {m}", path.display())))
    }

    /// The default configuration, or the one at `path`.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        self.feature_list()?;
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err("split_ratio must lie in (0, 1)".into());
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err("gamma must lie in [0, 1]".into());
        }
        if !(self.mean_eps > 0.0) {
            return Err("mean_eps must be positive".into());
        }
        if !(self.gmm_tol >= 0.0) {
            return Err("gmm_tol must be non-negative".into());
        }
        Ok(())
    }

    pub fn feature_list(&self) -> std::result::Result<Vec<Feature>, String> {
        let feats = self
            .features
            .iter()
            .map(|s| s.parse::<Feature>().map_err(|_| format!("unknown feature `{s}`")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if feats.len() < 2 {
            return Err("at least 2 features are required".into());
        }
        Ok(feats)
    }

    pub fn descriptor_dim(&self) -> usize {
        self.features.len()
    }

    pub fn pipeline_params(&self) -> PipelineParams {
        PipelineParams {
            segment: SegmentParams {
                morph_radius: self.morph_radius,
                min_area: self.min_area,
                polarity: match self.polarity {
                    PolarityName::Highest => Polarity::Highest,
                    PolarityName::Lowest => Polarity::Lowest,
                },
                gmm_tol: self.gmm_tol,
                gmm_max_iters: self.gmm_max_iters,
            },
            descriptor: DescriptorParams {
                features: self.feature_list().expect("validated"),
                channel: match self.channel {
                    ChannelName::A => Channel::A,
                    ChannelName::L => Channel::L,
                },
                region: match self.region {
                    RegionName::Mask => RegionMode::Mask,
                    RegionName::Bbox => RegionMode::BoundingBox,
                },
            },
        }
    }

    pub fn mean_params(&self) -> MeanParams {
        MeanParams {
            eps: self.mean_eps,
            max_iters: self.mean_max_iters,
        }
    }
}

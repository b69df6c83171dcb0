//! Versioned plain-text model files.
//!
//! ```text
//! tslda-model v1            mdrm-model v1
//! n <n>                     n <n>
//! classes <C>               classes <C>
//! gamma <γ>                 class <name>   (C lines)
//! class <name>   (C lines)  mean 0
//! reference                 spd <n> ...    (C blocks)
//! spd <n> ...
//! w 0 <m values>
//! b 0 <value>    (C pairs)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use leukocov_core::classify::{Classifier, MdrmModel, TsldaModel};
use leukocov_core::spdgeom::tangent_dim;
use leukocov_core::SpdMatrix;

use crate::error::{AppError, Result};
use crate::spdtext::{format_real, read_spd, write_spd, Lines};

const TSLDA_HEADER: &str = "tslda-model v1";
const MDRM_HEADER: &str = "mdrm-model v1";

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Mdrm(MdrmModel),
    Tslda(TsldaModel),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Mdrm(_) => "mdrm",
            Model::Tslda(_) => "tslda",
        }
    }

    fn inner(&self) -> &dyn Classifier {
        match self {
            Model::Mdrm(m) => m,
            Model::Tslda(m) => m,
        }
    }
}

impl Classifier for Model {
    fn n_classes(&self) -> usize {
        self.inner().n_classes()
    }

    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn predict(&self, p: &SpdMatrix) -> leukocov_core::Result<usize> {
        self.inner().predict(p)
    }
}

/// A model together with the names of its classes, in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub class_names: Vec<String>,
    pub model: Model,
}

impl SavedModel {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let n = self.model.dim();
        let header = match &self.model {
            Model::Mdrm(_) => MDRM_HEADER,
            Model::Tslda(_) => TSLDA_HEADER,
        };
        writeln!(out, "{header}\nn {n}\nclasses {}", self.class_names.len()).unwrap();
        if let Model::Tslda(m) = &self.model {
            writeln!(out, "gamma {}", format_real(m.gamma())).unwrap();
        }
        for name in &self.class_names {
            writeln!(out, "class {name}").unwrap();
        }
        match &self.model {
            Model::Mdrm(m) => {
                for (c, g) in m.class_means().iter().enumerate() {
                    writeln!(out, "mean {c}").unwrap();
                    write_spd(&mut out, g);
                }
            }
            Model::Tslda(m) => {
                out.push_str("reference\n");
                write_spd(&mut out, m.reference_mean());
                for (c, (w, b)) in m.weights().iter().zip(m.biases()).enumerate() {
                    let ws: Vec<String> = w.iter().map(|v| format_real(*v)).collect();
                    writeln!(out, "w {c} {}", ws.join(" ")).unwrap();
                    writeln!(out, "b {c} {}", format_real(*b)).unwrap();
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> std::result::Result<Self, String> {
        let mut lines = Lines::new(text);
        let header = lines.next_line()?;
        let tslda = match header {
            TSLDA_HEADER => true,
            MDRM_HEADER => false,
            other => return Err(format!("unknown model header `{other}`")),
        };
        let n: usize = lines.keyed_parse("n")?;
        let classes: usize = lines.keyed_parse("classes")?;
        if classes < 2 {
            return Err(lines.err("a model needs at least 2 classes"));
        }
        let gamma: f64 = if tslda { lines.keyed_parse("gamma")? } else { 0.0 };
        let class_names = (0..classes)
            .map(|_| lines.keyed("class").map(str::to_owned))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let check_n = |p: &SpdMatrix, lines: &Lines<'_>| {
            if p.n() == n {
                Ok(())
            } else {
                Err(lines.err(format_args!("matrix is {}x{0}, header says n = {n}", p.n())))
            }
        };
        let model = if tslda {
            if !lines.keyed("reference")?.is_empty() {
                return Err(lines.err("unexpected data after `reference`"));
            }
            let reference = read_spd(&mut lines)?;
            check_n(&reference, &lines)?;
            let m = tangent_dim(n);
            let mut weights = Vec::with_capacity(classes);
            let mut biases = Vec::with_capacity(classes);
            for c in 0..classes {
                let rest = indexed(&mut lines, "w", c)?;
                weights.push(lines.reals(rest, m)?);
                let rest = indexed(&mut lines, "b", c)?;
                biases.push(lines.reals(rest, 1)?[0]);
            }
            Model::Tslda(TsldaModel::from_parts(reference, gamma, weights, biases).map_err(|e| lines.err(e))?)
        } else {
            let mut means = Vec::with_capacity(classes);
            for c in 0..classes {
                let rest = indexed(&mut lines, "mean", c)?;
                if !rest.is_empty() {
                    return Err(lines.err("unexpected data after `mean <index>`"));
                }
                let g = read_spd(&mut lines)?;
                check_n(&g, &lines)?;
                means.push(g);
            }
            Model::Mdrm(MdrmModel::from_means(means).map_err(|e| lines.err(e))?)
        };
        if let Ok(extra) = lines.next_line() {
            return Err(lines.err(format_args!("trailing content `{extra}`")));
        }
        Ok(Self { class_names, model })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| AppError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::from_text(&text).map_err(|m| AppError::decode(path, m))
    }
}

/// Reads `<key> <index> <rest>` and returns `rest`.
fn indexed<'a>(lines: &mut Lines<'a>, key: &str, index: usize) -> std::result::Result<&'a str, String> {
    let rest = lines.keyed(key)?;
    let (idx, tail) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    if idx.parse::<usize>().ok() != Some(index) {
        return Err(lines.err(format_args!("expected `{key} {index}`")));
    }
    Ok(tail.trim())
}

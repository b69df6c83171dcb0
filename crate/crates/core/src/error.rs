use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(&'static str),
    #[error("matrix is not symmetric")]
    NonSymmetric,
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector length {len} is not n(n+1)/2 for n = {n}")]
    LengthMismatch { len: usize, n: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("region has {area} pixels, at least 2 are required")]
    RegionTooSmall { area: usize },
    #[error("image has {distinct} distinct values, at least 3 are required")]
    DegenerateInput { distinct: usize },
    #[error("class {class} has no samples")]
    EmptyClass { class: usize },
    #[error("class {class} has {count} samples, at least {required} are required")]
    InsufficientSamples {
        class: usize,
        count: usize,
        required: usize,
    },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("within-class scatter is singular; use a shrinkage gamma > 0")]
    SingularScatter,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {field}: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("degenerate medium: Y = γ21(γ31 + iδ) + |Ω_c|²/4 vanishes")]
    DegenerateMedium,

    #[error("time step {dt} too large: dt·rate = {product} exceeds 0.1")]
    StepSize { dt: f64, product: f64 },

    #[error("integrator needs at least 100 steps, got {0}")]
    StepCount(usize),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field amplitude on ring r = {radius} falls below the phase floor")]
    AmplitudeFloor { radius: f64 },

    #[error("winding {value} on ring r = {radius} is not within 0.05 of an integer")]
    NonIntegerWinding { radius: f64, value: f64 },

    #[error("radius {radius} lies outside the grid (max {max})")]
    OutOfGrid { radius: f64, max: f64 },

    #[error("profile has no azimuthal structure")]
    StructurelessProfile,

    #[error("field is identically zero")]
    ZeroField,

    #[error("unknown figure id {0:?}")]
    UnknownFigure(String),

    #[error("malformed field file {path}: {message}")]
    MalformedFile { path: PathBuf, message: String },

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit status for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Read { .. } | Error::MalformedFile { .. } => 2,
            _ => 1,
        }
    }
}

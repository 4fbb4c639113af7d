use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },

    #[error("invalid bandlimit {0}: must be in 1..={max}", max = crate::grid::MAX_BANDLIMIT)]
    InvalidBandlimit(usize),

    #[error("cloud is not centered: centroid offset {offset:e} exceeds {tolerance:e}")]
    NotCentered { offset: f64, tolerance: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid harmonic degree/order (l={l}, m={m})")]
    InvalidDegreeOrder { l: i64, m: i64 },

    #[error("invalid filter parameter: {0}")]
    InvalidFilterParam(String),

    #[error("cannot resample {have} points down to {target}")]
    ShrinkRequested { have: usize, target: usize },

    #[error("sequence length mismatch: {originals} originals vs {adversarials} adversarials")]
    LengthMismatch {
        originals: usize,
        adversarials: usize,
    },

    #[error("empty input set")]
    EmptySet,

    #[error("bandlimit mismatch: {0} vs {1}")]
    BandlimitMismatch(usize, usize),

    #[error("cloud has {points} points; need more than k={k}")]
    TooFewPoints { points: usize, k: usize },

    #[error("cannot drop {drop} of {points} points")]
    DropTooLarge { drop: usize, points: usize },

    #[error("invalid perturbation: {0}")]
    InvalidSpec(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for failures caused by the filesystem rather than by data or parameters.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

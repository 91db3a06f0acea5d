use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty n-gram sequence")]
    EmptySequence,

    #[error("marginal totals differ: {left} vs {right}")]
    MarginalMismatch { left: f64, right: f64 },

    #[error("negative or non-finite transport weight {0}")]
    InvalidWeight(f64),

    #[error("no lexicon pair could be resolved in both embedding spaces")]
    NoResolvablePairs,

    #[error("need at least {needed} resolvable pairs, found {found}")]
    TooFewPairs { needed: usize, found: usize },

    #[error("misalignment matrix is numerically zero; nothing to remove")]
    NoMisalignment,

    #[error("singular value decomposition did not converge after {sweeps} sweeps")]
    SvdNoConvergence { sweeps: usize },

    #[error("transport solver exceeded {0} pivots")]
    TransportNoConvergence(usize),

    #[error("re-mapping pipeline must contain at least one step")]
    EmptyPipeline,

    #[error("invalid pipeline spec {0:?}: expected steps from {{clp, umd}} joined by '.'")]
    InvalidPipelineSpec(String),

    #[error("discount must lie strictly between 0 and 1, got {0}")]
    InvalidDiscount(f64),

    #[error("zero variance in correlation input")]
    ZeroVariance,

    #[error("all values tied; rank correlation undefined")]
    AllTied,

    #[error("need at least {needed} usable points, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("duplicate key {0:?}")]
    DuplicateKey(String),

    #[error("unscorable: {0}")]
    Unscorable(String),

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}

use std::path::PathBuf;

/// Errors produced by the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("interval [{lo}, {hi}] is empty or degenerate")]
    InvalidInterval { lo: i64, hi: i64 },

    #[error("coordinate {value} exceeds the lattice bound of 2^40")]
    CoordinateOverflow { value: i128 },

    #[error("box {index} leaves the lattice bound after 3-dilation")]
    FamilyOverflow { index: usize },

    #[error("dilation factor {0} is not a positive odd integer")]
    InvalidDilation(u32),

    #[error("profile has no sample at side lengths ({x}, {y})")]
    OffTable { x: i64, y: i64 },

    #[error("operation needs at least one box")]
    EmptyInput,

    #[error("exponential weight e^({c} * {depth}) overflows a double")]
    ExpOverflow { depth: usize, c: f64 },

    #[error("candidate {candidate}: {source}")]
    Candidate {
        candidate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("grid side {side} exceeds the enumeration limit {max}")]
    GridTooLarge { side: usize, max: usize },

    #[error("field has {got} values but its grid has {expected} cells")]
    FieldShape { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("family generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

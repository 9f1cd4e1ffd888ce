use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("row {row}: duplicate (resolution, qp) = ({resolution}, {qp}) for sequence {sequence_id}")]
    DuplicatePoint {
        row: usize,
        sequence_id: String,
        resolution: u32,
        qp: u32,
    },
    #[error("row {row}: ({resolution}, {qp}) outside the configured (R, Q) sets")]
    OutOfGrid { row: usize, resolution: u32, qp: u32 },
    #[error("quality metric {0} is missing on one or more points")]
    MissingQuality(&'static str),
    #[error("parameter space for sequence {0} is empty")]
    EmptySpace(String),
    #[error("Pareto front is empty")]
    EmptyFront,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("curve has {0} usable points, need at least 2")]
    InsufficientPoints(usize),
    #[error("quality ranges of the two curves do not overlap")]
    NoOverlap,
    #[error("reference decode-time sum must be positive, got {0}")]
    NonPositiveReference(f64),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("no common sequences between method and reference ladders")]
    NoCommonSequences,
    #[error("resolution {0} not present in the parameter space")]
    ResolutionAbsent(u32),
    #[error("no bitrate-resolution pair configured for target {0} kbps")]
    UnmappedTarget(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

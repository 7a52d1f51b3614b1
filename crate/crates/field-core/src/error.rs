use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("dimension {0} is not supported; only odd dimensions 3 and 5 are implemented")]
    Dimension(u32),
    #[error("multiplicity slot {m} out of range for degree {l} in dimension {d} (dim = {dim})")]
    Multiplicity { d: u32, l: u32, m: u32, dim: u64 },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),
    #[error("{0} has no physical view; reconstruct it with the inverse transform first")]
    MissingPhysical(String),
    #[error("operation is implemented for radial (l = 0) states only")]
    NonRadial,
    #[error("non-finite sample in {0}")]
    NonFinite(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("time nodes must be strictly increasing")]
    TimeOrder,
    #[error("container: {0}")]
    Container(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

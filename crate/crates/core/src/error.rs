use thiserror::Error;

/// Errors raised by the Lax-matrix operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaxError {
    #[error("entry ({row},{col}) has degree {degree}, shape bound is {bound}")]
    ShapeViolation {
        row: usize,
        col: usize,
        degree: usize,
        bound: i64,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("gauge block B is singular (|det B| = {det_abs:e})")]
    SingularB { det_abs: f64 },
    #[error("matrix is not in M_c at the requested node (|det D| = {det_abs:e})")]
    NotInMc { det_abs: f64 },
    #[error("matrix is not on the representative slice (violation {violation:e})")]
    NotInSlice { violation: f64 },
    #[error("multipoint is not in the image of phi (residual {residual:e})")]
    NotInImage { residual: f64 },
    #[error("synthetic division left remainder {residual:e}")]
    DivisionResidue { residual: f64 },
    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),
    #[error("polynomial has a multiple root (separation {separation:e})")]
    MultipleRoot { separation: f64 },
    #[error("no admissible vector nu found for the point x = {x}")]
    NuNotFound { x: String },
    #[error("the spectral cover is ramified over {node}")]
    RamifiedPoint { node: String },
    #[error("closed-form denominator {formula} vanishes")]
    ZeroDenominator { formula: usize },
    #[error("trajectory left the slice at t = {time} (violation {violation:e})")]
    SliceExit { time: f64, violation: f64 },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, LaxError>;

impl From<std::io::Error> for LaxError {
    fn from(e: std::io::Error) -> Self {
        LaxError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LaxError {
    fn from(e: serde_json::Error) -> Self {
        LaxError::Parse(e.to_string())
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used for process exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: unknown names, malformed expressions, inconsistent arguments.
    Usage,
    /// A numerical routine could not produce a trustworthy answer.
    Numerical,
    /// Reading or writing files failed.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("affine map is not a contraction (operator norm {0})")]
    NotContraction(f64),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("unknown fractal family `{0}`")]
    UnknownFamily(String),
    #[error("invalid IFS: {0}")]
    InvalidIfs(String),
    #[error(
        "vertex dedup ambiguity: nearest match at distance {distance:e} with tolerance {tolerance:e}"
    )]
    DedupAmbiguity { distance: f64, tolerance: f64 },
    #[error("coarse vertex {0} has no matching fine vertex")]
    UnmatchedVertex(usize),
    #[error("incompatible meshes: {0}")]
    IncompatibleMeshes(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("triangle area measure requires a mesh with cells")]
    MissingCells,
    #[error("edge {0} has zero length")]
    ZeroLengthEdge(usize),
    #[error("cell {0} is degenerate (zero area)")]
    DegenerateCell(usize),
    #[error("empty interior: every vertex is a boundary vertex")]
    EmptyInterior,
    #[error("singular interior block: {0} interior vertices are not connected to the boundary")]
    SingularInterior(usize),
    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("solution residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("every ratio denominator was below the guard; no estimate available")]
    AllExcluded,
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("renormalization constant must be positive, got {0}")]
    NonPositiveConstant(f64),
    #[error("scale factor {constant}^{level} is not representable")]
    ScaleOverflow { constant: f64, level: usize },
    #[error("method `{method}` is not available for family `{family}`")]
    MethodMismatch { method: String, family: String },
    #[error("invalid boundary data: {0}")]
    BoundaryValues(String),
    #[error("expression error: {0}")]
    Expression(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DedupAmbiguity { .. }
            | Error::NotContraction(_)
            | Error::ZeroLengthEdge(_)
            | Error::DegenerateCell(_)
            | Error::SingularInterior(_)
            | Error::NotSpd(_)
            | Error::NotConverged { .. }
            | Error::ResidualTooLarge { .. }
            | Error::AllExcluded
            | Error::ScaleOverflow { .. }
            | Error::UnmatchedVertex(_) => ErrorKind::Numerical,
            Error::Io(_) => ErrorKind::Io,
            Error::Json(e) if e.is_io() => ErrorKind::Io,
            _ => ErrorKind::Usage,
        }
    }
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

/// Problems with a declarative pencil description.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("spec has no eigenvalues")]
    NoEigenvalues,
    #[error("eigenvalue {0} has no Jordan blocks")]
    NoBlocks(String),
    #[error("Jordan block size must be at least 1")]
    ZeroBlockSize,
    #[error("block sign must be +1 or -1, got {0}")]
    BadSign(i64),
    #[error("duplicate eigenvalue {0}")]
    DuplicateEigenvalue(String),
    #[error("unsupported: complex block (lambda = {0:?})")]
    ComplexBlock(String),
    #[error(transparent)]
    BadLambda(#[from] ParseRationalError),
    #[error("malformed spec JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    DimensionMismatch { expected: usize, rows: usize, cols: usize },
    #[error("bilinear form is degenerate")]
    DegenerateForm,
    #[error("expected a single eigenvalue, found {0}")]
    MultipleEigenvalues(usize),
    #[error("block indices ({i}, {j}) out of range or not i < j inside one eigenvalue")]
    BlockIndex { i: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealizeError {
    #[error("metric is singular at the requested point")]
    SingularMetric,
    #[error("curvature from the closed formula and from Christoffel derivatives disagree at wedge ({0}, {1})")]
    RouteMismatch(usize, usize),
    #[error("metric export is malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("metric is singular at x = {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("loop needs at least {min} steps per edge, got {got}")]
    TooFewSteps { min: usize, got: usize },
    #[error("loop side must be positive and finite, got {0}")]
    BadSide(f64),
    #[error("plane ({0}, {1}) is not a pair of distinct coordinates")]
    BadPlane(usize, usize),
    #[error("integration produced non-finite values")]
    NonFinite,
}

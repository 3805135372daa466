use thiserror::Error;

/// Errors raised anywhere in the curvature pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CurvError {
    #[error("unsupported jet order {0} (maximum is {max})", max = crate::jets::MAX_ORDER)]
    UnsupportedOrder(usize),

    #[error("jet mismatch: dim/order {left:?} vs {right:?}")]
    JetMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("evaluation domain error in `{location}`: {func} undefined at {value}")]
    EvaluationDomain {
        func: String,
        value: f64,
        location: String,
    },

    #[error("derivative exhausted: cannot differentiate an order-0 jet")]
    DerivativeExhausted,

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("variable x{index} out of range for dimension {dim} (byte {offset})")]
    VariableOutOfRange {
        index: usize,
        dim: usize,
        offset: usize,
    },

    #[error("exponent {0} must be an integer or half-integer constant")]
    BadExponent(f64),

    #[error("degenerate metric at {point:?}: {detail}")]
    DegenerateMetric { point: Vec<f64>, detail: String },

    #[error("point {point:?} lies outside the chart domain (predicate = {value})")]
    OutsideDomain { point: Vec<f64>, value: f64 },

    #[error("manifold `{0}` has no almost complex structure")]
    NotAlmostHermitian(String),

    #[error("frame construction failed: {0}")]
    FrameConstruction(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("formula domain error: {0}")]
    FormulaDomain(String),

    #[error("hypothesis not met for {tag}: {reason}")]
    HypothesisNotMet { tag: String, reason: String },

    #[error("invariant violation: {what} (residual {residual:e})")]
    InvariantViolation { what: String, residual: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("{pointer}: {source}")]
    InField {
        pointer: String,
        source: Box<CurvError>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = CurvError> = std::result::Result<T, E>;

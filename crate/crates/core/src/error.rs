use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` appears in more than one argument set")]
    OverlappingVariables(String),

    #[error("duplicate axis `{0}`")]
    DuplicateAxis(String),

    #[error("axis `{0}` has zero cardinality")]
    ZeroCardinality(String),

    #[error("invalid probability tensor: {0}")]
    InvalidPmf(String),

    #[error("information quantity evaluated to {0:e}, below the clamping tolerance")]
    NegativeInformation(f64),

    #[error("sequence length mismatch: {0}")]
    LengthMismatch(String),

    #[error("symbol {symbol} out of range for `{axis}` (cardinality {card})")]
    SymbolOutOfRange { axis: String, symbol: usize, card: usize },

    #[error("cardinality mismatch on `{axis}`: channel has {expected}, input has {found}")]
    CardinalityMismatch {
        axis: String,
        expected: usize,
        found: usize,
    },

    #[error("kernel row (x1={x1}, x2={x2}) sums to {sum}, expected 1")]
    RowSum { x1: usize, x2: usize, sum: f64 },

    #[error("kernel entry {index} is {value}; entries must be finite and nonnegative")]
    BadKernelEntry { index: usize, value: f64 },

    #[error("channel file: {0}")]
    ChannelFormat(String),

    #[error("invalid Gaussian channel: {0}")]
    InvalidGaussian(String),

    #[error("{result} requires {hypothesis}; got {detail}")]
    Hypothesis {
        result: &'static str,
        hypothesis: &'static str,
        detail: String,
    },

    #[error("power-split parameter {0} outside [0, 1]")]
    AlphaOutOfRange(f64),

    #[error("psi is defined for nonnegative arguments, got {0}")]
    NegativePsiArgument(f64),

    #[error("channel output Y1 is not a deterministic function of (X1, X2)")]
    NotSemiDeterministic,

    #[error("operation needs a region with {expected} active dimensions, got {found}")]
    WrongDimensionality { expected: usize, found: usize },

    #[error("rate constraint `{constraint}` violated by {excess:.6} bits")]
    RateConstraint { constraint: String, excess: f64 },

    #[error("invalid scheme parameter: {0}")]
    InvalidScheme(String),

    #[error("message index out of range: {0}")]
    MessageOutOfRange(String),

    #[error("{what} needs {needed} units, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    NonConvergence { estimate: f64, tolerance: f64 },

    #[error("invalid domain [{lo}, {hi}]: endpoints must be finite and ordered")]
    InvalidDomain { lo: f64, hi: f64 },

    #[error("singular matrix: pivot magnitude {pivot:e} at column {column}")]
    Singular { pivot: f64, column: usize },

    #[error(
        "normal equations too ill-conditioned for {digits} digits (condition estimate {condition:e}); increase precision_digits"
    )]
    IllConditioned { condition: f64, digits: u32 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown symbol `{symbol}` at position {position}")]
    UnknownSymbol { symbol: String, position: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("stencil nodes must be pairwise distinct (node {0} repeats)")]
    DuplicateNodes(usize),

    #[error("derivative order {order} needs at least {needed} nodes, got {got}")]
    OrderTooHigh { order: usize, needed: usize, got: usize },

    #[error("step t must be nonzero")]
    ZeroStep,

    #[error("grid function does not decay at its edges (|g| = {edge:e} > {tolerance:e}); enlarge the grid")]
    EdgeLeakage { edge: f64, tolerance: f64 },

    #[error("highest frequency N*t = {max_frequency} must be below omega = {omega}")]
    FrequencyBound { max_frequency: f64, omega: f64 },
}

use thiserror::Error;

/// Errors produced by the analyses in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported family descriptor: {0}")]
    UnsupportedFamily(String),

    #[error("order not constructible: no Hadamard matrix of order {0} is available")]
    OrderNotConstructible(usize),

    #[error("vertex {index} out of range for graph on {n} vertices")]
    InvalidVertex { index: usize, n: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("quotient column {0} has zero weight")]
    ZeroWeightColumn(usize),

    #[error("ill-conditioned spectrum: {0}")]
    IllConditioned(String),

    #[error("not distance-regular: vertices ({x}, {y}) at distance {distance}: {detail}")]
    NotDistanceRegular {
        x: usize,
        y: usize,
        distance: usize,
        detail: String,
    },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("density does not integrate to one (integral = {0})")]
    Unnormalized(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-range input data.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidGraph(_)
                | Error::Parse { .. }
                | Error::UnsupportedFamily(_)
                | Error::OrderNotConstructible(_)
                | Error::InvalidVertex { .. }
                | Error::InvalidPartition(_)
                | Error::ZeroWeightColumn(_)
                | Error::NotDistanceRegular { .. }
                | Error::Unnormalized(_)
        )
    }

    /// True for failures of internal numerical self-checks.
    pub fn is_consistency_error(&self) -> bool {
        matches!(self, Error::IllConditioned(_) | Error::Consistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

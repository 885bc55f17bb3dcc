use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument or parameter lies outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A recursion produced a non-finite or overflowing value at time `t` (1-based).
    #[error("numeric overflow in {quantity} at t = {t}")]
    NumericOverflow { quantity: &'static str, t: usize },

    #[error("insufficient data: {n} observations, at least {required} required")]
    InsufficientData { n: usize, required: usize },

    #[error("singular information matrix (condition number {condition:.3e})")]
    SingularInformation { condition: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("unsupported model order: {0}")]
    UnsupportedOrder(String),

    #[error("optimizer failed to converge: {0}")]
    NonConvergence(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

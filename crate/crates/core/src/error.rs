use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes or field parameters of the operands do not fit together.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The operation is undefined for this input (inverse of zero, rank-deficient input, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("rate bound violated: k = {k} exceeds n - 2t - mu = {bound}")]
    RateBound { k: usize, bound: i64 },

    #[error("message size must be at least one packet")]
    EmptyMessage,

    #[error("packet length too short: m = {m} < n = {n}")]
    PacketLength { m: usize, n: usize },

    #[error("enumeration budget exceeded: {required} cases required, budget is {budget}")]
    Budget { required: u128, budget: u64 },

    #[error("linear system is inconsistent")]
    Inconsistent,

    #[error("linear system is underdetermined ({free} free variables)")]
    Underdetermined { free: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Parameter-set rejections that come from the rate / packet-length bounds.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::RateBound { .. } | Error::PacketLength { .. } | Error::EmptyMessage
        )
    }
}

/// Returns `Err(Error::Budget)` when `required` exceeds `budget`.
pub fn check_budget(required: u128, budget: u64) -> Result<()> {
    if required > budget as u128 {
        Err(Error::Budget { required, budget })
    } else {
        Ok(())
    }
}

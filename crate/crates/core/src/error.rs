use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("{func}: result overflows f64 (use the scaled form)")]
    Overflow { func: &'static str },

    #[error("{what}: no convergence after {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },

    #[error("hypergeometric lower parameter b[{index}] = {value} is a non-positive integer")]
    Pole { index: usize, value: f64 },

    #[error("E({n}) = 0: the E-factorial vanishes; build on the ladder subspace instead")]
    ZeroDivisor { n: usize },

    #[error("E({n}) = {value} is negative")]
    NegativeE { n: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature failed{}: {detail}", .n.map(|n| format!(" at n = {n}")).unwrap_or_default())]
    Quadrature { n: Option<usize>, detail: String },

    #[error("{channel} channel has zero mean photon number; g2 is undefined")]
    DegenerateChannel { channel: &'static str },

    #[error("cutoff would exceed the hard cap of {cap} levels")]
    CutoffExceeded { cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}

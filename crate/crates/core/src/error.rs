use thiserror::Error;

/// Errors raised when an input falls outside an operation's domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    Dimension(usize),
    #[error("noise parameter must lie in [0, 1], got {0}")]
    Noise(f64),
    #[error("beta0 + (n-1)*beta1 must equal 1, got {0}")]
    NotNormalized(f64),
    #[error("beta1 ({beta1}) exceeds beta0 ({beta0})")]
    BetaOrder { beta0: f64, beta1: f64 },
    #[error("block length must be at least {min}, got {got}")]
    BlockLength { min: usize, got: usize },
    #[error("asymptotic forms need noise strictly inside (0, 1), got {0}")]
    AsymptoticEndpoint(f64),
    #[error("invalid dimension range {min}..={max}")]
    Range { min: usize, max: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("threshold search could not bracket the secure region for n={0}")]
    Bracketing(usize),
    #[error("overlap must lie in [0, 1], got {0}")]
    Overlap(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0})")]
    NotPsd(f64),
    #[error("nit value {value} out of range for n={n}")]
    NitRange { value: u32, n: usize },
    #[error("block lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("blocks must not be empty")]
    EmptyBlock,
    #[error("bad blocks carry no distilled value")]
    BadBlock,
    #[error("contingency table is empty")]
    EmptyTable,
    #[error("table shape {rows}x{cols} does not match {len} counts")]
    TableShape { rows: usize, cols: usize, len: usize },
    #[error("block count must be at least 1")]
    NoBlocks,
}

pub type Result<T> = std::result::Result<T, Error>;

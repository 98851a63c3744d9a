use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scalar context mismatch (operands built over different session fields)")]
    ContextMismatch,
    #[error("element is not invertible in this representation")]
    NotInvertible,
    #[error("operation requires concrete mode (f = 1, delta = 0)")]
    NotConcrete,
    #[error("function does not vanish near the origin")]
    NotSchwartzZero,
    #[error("denominator is not a power of p")]
    BadDenominator,
    #[error("residue {0} is not a unit modulo p^{1}")]
    NotUnit(i64, u32),
    #[error("conductor exponent {0} exceeds the session bound {1}")]
    ConductorBound(u32, u32),
    #[error("grid of {0} cells exceeds the configured cap of {1}")]
    GridTooLarge(u64, u64),
    #[error("spectral component has a denominator; not a finitely supported function")]
    NotLaurent,
    #[error("root number unavailable: ramified gamma factors need a concrete session")]
    RootNumberUnavailable,
    #[error("grid level {m} too small for this trace; need at least {need}")]
    GridLevelTooSmall { m: u32, need: u32 },
    #[error("closed form requires 2n >= delta")]
    CutoffRegime,
    #[error("functional-equation ratio is not a single monomial")]
    NotMonomial,
    #[error("operator output escapes the grid space; raise the grid level")]
    GridLeak,
    #[error("unit-invariant input required for the sector oracle")]
    NotUnitInvariant,
    #[error("root-of-unity order {0} does not divide the ambient conductor {1}")]
    OrderOutsideField(u64, u64),
    #[error("session bound exceeded: {0}")]
    Infeasible(String),
    #[error("invalid input: {0}")]
    Parse(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

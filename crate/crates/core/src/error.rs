use thiserror::Error;

/// Every failure the engine can report. Variants map onto the CLI exit codes:
/// precondition failures are mathematical, the rest are usage errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed cyclotomic field indices {0} and {1}")]
    FieldMismatch(u32, u32),
    #[error("root of unity zeta_{order}^{power} is not representable with cyclotomic index {index}")]
    RootOfUnity { order: u32, power: u32, index: u32 },
    #[error("mismatched truncation orders: {0}")]
    OrderMismatch(String),
    #[error("non-unit series: constant term is zero")]
    NonUnitSeries,
    #[error("series exponential requires a zero constant term")]
    NonZeroConstant,
    #[error("wave function not defined at condition point {0}")]
    ConditionPoint(String),
    #[error("degenerate spectral data: {0}")]
    DegenerateSpectralData(String),
    #[error("Wronskian vanishes at base point {0}; shift the base point")]
    VanishingWronskian(String),
    #[error("kernel not invariant: {0}")]
    KernelNotInvariant(String),
    #[error("exponential data cannot be expanded exactly about base point {0}; use base point 0")]
    TranscendentalBasePoint(String),
    #[error("tau function not normalized at the base point and unnormalized mode not set")]
    NotNormalized,
    #[error("truncation too shallow: {0}")]
    TruncationTooShallow(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

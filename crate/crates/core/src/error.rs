use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field specification: {0}")]
    InvalidFieldSpec(String),
    #[error("unsupported characteristic {0}: p must be an odd prime")]
    UnsupportedCharacteristic(u64),
    #[error("requested precision too large: p^{exp} must fit below 2^63")]
    PrecisionTooLarge { exp: u32 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("Newton polytope is not full dimensional (dimension {dim} < {n})")]
    NotFullDimensional { dim: usize, n: usize },
    #[error("empty support")]
    EmptySupport,
    #[error("polynomial is degenerate modulo p ({0})")]
    NondegeneracyFailure(String),
    #[error("internal precision error: {0}")]
    InternalPrecisionError(String),
    #[error("monomial {0} admits no cone decomposition")]
    DecompositionError(String),
    #[error("reduction did not terminate: {0}")]
    NonTermination(String),
    #[error("precision or logic error: {0}")]
    PrecisionOrLogicError(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("consistency check failed: {0}")]
    ConsistencyFailure(String),
    #[error("point counting budget exceeded ({0} evaluations)")]
    BudgetExceeded(u128),
    #[error("not enough point counts to determine the zeta function: {0}")]
    UnderDetermined(String),
    #[error("dimension {0} exceeds the supported maximum of 6")]
    DimensionTooLarge(usize),
    #[error("the zero element has no leading monomial")]
    EmptyElement,
}

impl Error {
    /// Process exit code used by the command line tool, one per error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidFieldSpec(_) => 10,
            Error::UnsupportedCharacteristic(_) => 11,
            Error::PrecisionTooLarge { .. } => 12,
            Error::InvalidInput(_) => 13,
            Error::NotFullDimensional { .. } => 14,
            Error::EmptySupport => 15,
            Error::NondegeneracyFailure(_) => 16,
            Error::InternalPrecisionError(_) => 17,
            Error::DecompositionError(_) => 18,
            Error::NonTermination(_) => 19,
            Error::PrecisionOrLogicError(_) => 20,
            Error::InsufficientPrecision(_) => 21,
            Error::ConsistencyFailure(_) => 22,
            Error::BudgetExceeded(_) => 23,
            Error::UnderDetermined(_) => 24,
            Error::DimensionTooLarge(_) => 25,
            Error::EmptyElement => 26,
        }
    }
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidFieldSpec(_) => "InvalidFieldSpec",
            Error::UnsupportedCharacteristic(_) => "UnsupportedCharacteristic",
            Error::PrecisionTooLarge { .. } => "PrecisionTooLarge",
            Error::InvalidInput(_) => "InvalidInput",
            Error::NotFullDimensional { .. } => "NotFullDimensional",
            Error::EmptySupport => "EmptySupport",
            Error::NondegeneracyFailure(_) => "NondegeneracyFailure",
            Error::InternalPrecisionError(_) => "InternalPrecisionError",
            Error::DecompositionError(_) => "DecompositionError",
            Error::NonTermination(_) => "NonTermination",
            Error::PrecisionOrLogicError(_) => "PrecisionOrLogicError",
            Error::InsufficientPrecision(_) => "InsufficientPrecision",
            Error::ConsistencyFailure(_) => "ConsistencyFailure",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::UnderDetermined(_) => "UnderDetermined",
            Error::DimensionTooLarge(_) => "DimensionTooLarge",
            Error::EmptyElement => "EmptyElement",
        }
    }

    /// A short pointer to the condition that was violated.
    pub fn hint(&self) -> &'static str {
        match self {
            Error::InvalidFieldSpec(_) => "the field polynomial must be monic and irreducible of degree a over F_p",
            Error::UnsupportedCharacteristic(_) => "only odd primes are supported",
            Error::PrecisionTooLarge { .. } => "p^N_work must stay below 2^63; lower the precision or use a smaller field",
            Error::InvalidInput(_) => "check the input file against the documented JSON format",
            Error::NotFullDimensional { .. } => "the Newton polytope must be full dimensional; drop a variable or change coordinates",
            Error::EmptySupport => "the polynomial must have at least one nonzero term",
            Error::NondegeneracyFailure(_) => {
                "f must be nondegenerate: for every face of the Newton polytope, f restricted to the face and its logarithmic derivatives have no common zero in the torus"
            }
            Error::InternalPrecisionError(_) => "an internal division lost precision; rerun with a larger --precision",
            Error::DecompositionError(_) => "a monomial could not be written over the degree n+2 cone points",
            Error::NonTermination(_) => "the reduction loop exceeded its step bound",
            Error::PrecisionOrLogicError(_) => "a structural divisibility check failed; rerun with a larger --precision",
            Error::InsufficientPrecision(_) => "lifted coefficients exceed the Weil-type bound; rerun with a larger --precision",
            Error::ConsistencyFailure(_) => "the result disagrees with an independent check",
            Error::BudgetExceeded(_) => "exhaustive counting is too expensive; lower r or raise the budget",
            Error::UnderDetermined(_) => "supply more point counts or smaller degree bounds",
            Error::DimensionTooLarge(_) => "at most 6 variables are supported",
            Error::EmptyElement => "internal error: leading monomial of zero",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

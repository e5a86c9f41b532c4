use alloc::boxed::Box;
use alloc::string::String;

use crate::modcat::Certificate;

pub type Result<T> = core::result::Result<T, Error>;

/// Which of the module axioms failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `det C` vanishes to the working precision.
    DetZero,
    /// `D^n` is not zero to the working precision.
    NonNilpotent,
    /// `sigma(D) C != C D`.
    Semilinearity,
    /// `B = (D - pi0) C^{-1}` has an entry of negative valuation.
    Strictness,
    /// An entry of `C` or `D` is not in `O`.
    NotIntegral,
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Violation::DetZero => "det C is zero to precision",
            Violation::NonNilpotent => "D is not nilpotent to precision",
            Violation::Semilinearity => "sigma(D) C != C D",
            Violation::Strictness => "B = (D - pi0 E) C^-1 is not integral",
            Violation::NotIntegral => "C or D has an entry outside O",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("field: {0}")]
    Field(&'static str),
    #[error("field descriptors do not match")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is zero to precision {0} and cannot be inverted")]
    ZeroToPrecision(i64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("base data mismatch: {0}")]
    BaseMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("module fails validation: {violation}")]
    Validation {
        violation: Violation,
        certificate: Box<Certificate>,
    },
    #[error("morphism check failed: {0}")]
    NotAHom(String),
    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),
    #[error("size cap exceeded: {size} > {cap}")]
    SizeCap { size: u64, cap: u64 },
    #[error("tower insufficient: found {found} of {expected} points ({detail})")]
    TowerInsufficient {
        found: usize,
        expected: u64,
        detail: String,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("recursion depth {0} exceeded")]
    Depth(usize),
}

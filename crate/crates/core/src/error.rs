use thiserror::Error;

use crate::arith::Int;
use crate::decomposition::PartialTrace;
use crate::parametrization::Solution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    ZeroDivisor,
    #[error("{num} is not divisible by {den}")]
    NotDivisible { num: Int, den: Int },
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: Int, modulus: Int },
    #[error("modulus is zero")]
    ZeroModulus,
    #[error("binomial({n}, {k}) requires 0 <= k <= n")]
    BinomialRange { n: i64, k: i64 },
    #[error("negative exponent {0}")]
    NegativeExponent(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} and {1} are not coprime")]
    NotCoprime(Int, Int),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("z evaluates to zero, w is undefined")]
    ZeroZ,
    #[error("identity x^p - m*y^p = z*w fails for {0}")]
    IdentityViolation(Box<Solution>),
    #[error("closed forms are only defined for p = 2, got p = {0}")]
    WrongExponent(u32),
    #[error("not a theorem-grade solution: {0}")]
    NotTheoremGrade(String),
    #[error("residual e is zero (u^p = m*q^p), g cannot be defined")]
    DegenerateE(Option<Box<PartialTrace>>),
    #[error("regenerated {got} differs from input {expected}")]
    RoundTripMismatch {
        expected: Box<Solution>,
        got: Box<Solution>,
    },
    #[error("postcondition violated: {0}")]
    Postcondition(String),
}

impl Error {
    /// Stable identifier used in structured output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroDivisor => "ZeroDivisor",
            Error::NotDivisible { .. } => "NotDivisible",
            Error::NotInvertible { .. } => "NotInvertible",
            Error::ZeroModulus => "ZeroModulus",
            Error::BinomialRange { .. } => "BinomialRange",
            Error::NegativeExponent(_) => "NegativeExponent",
            Error::NotPrime(_) => "NotPrime",
            Error::NotCoprime(..) => "NotCoprime",
            Error::Precondition(_) => "Precondition",
            Error::ZeroZ => "ZeroZ",
            Error::IdentityViolation(_) => "IdentityViolation",
            Error::WrongExponent(_) => "WrongExponent",
            Error::NotTheoremGrade(_) => "NotTheoremGrade",
            Error::DegenerateE(_) => "DegenerateE",
            Error::RoundTripMismatch { .. } => "RoundTripMismatch",
            Error::Postcondition(_) => "Postcondition",
        }
    }

    /// True for errors caused by the input rather than by a broken proof step.
    pub fn is_domain(&self) -> bool {
        !matches!(
            self,
            Error::NotDivisible { .. }
                | Error::IdentityViolation(_)
                | Error::RoundTripMismatch { .. }
                | Error::Postcondition(_)
        )
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("prime {0} is too large for the field kernel (limit 65521)")]
    PrimeTooLarge(u64),

    #[error("extension degree {degree} is outside 1..={cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("field context mismatch: F_{{{left_p}^{left_n}}} vs F_{{{right_p}^{right_n}}}")]
    ContextMismatch {
        left_p: u32,
        left_n: usize,
        right_p: u32,
        right_n: usize,
    },

    #[error("degree {sub} does not divide {degree}")]
    BadDegree { sub: usize, degree: usize },

    #[error("operator failed the F_p-linearity check")]
    NotLinear,

    #[error("division by zero")]
    DivisionByZero,

    #[error("homomorphism is zero: its kernel is connected, not finite")]
    ConnectedKernel,

    #[error("no splitting field of degree <= {cap} found")]
    ExtensionCap { cap: usize },

    #[error("enumeration budget exceeded: {what} needs {needed}, cap is {cap}")]
    EnumerationCap {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("not skew-symmetric")]
    NotSkew,

    #[error("subgroup is not isotropic")]
    NotIsotropic,

    #[error("vectors are linearly dependent over F_p")]
    Dependent,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported construction: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// A computation that is guaranteed to succeed mathematically did not.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Budget exhaustion (field degree or enumeration size), as opposed to bad input.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::ExtensionCap { .. } | Error::EnumerationCap { .. } | Error::DegreeCap { .. }
        )
    }
}

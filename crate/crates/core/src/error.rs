use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("block shape mismatch: {0}")]
    Shape(String),

    #[error("elements live in different algebras")]
    AlgebraMismatch,

    #[error("exponent {0} is outside the admissible range {1}")]
    Exponent(f64, &'static str),

    #[error("exponents {p} and {q} are not conjugate")]
    NotConjugate { p: f64, q: f64 },

    #[error("element is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("density is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("centralizer `{0}` is not lazy")]
    NotLazy(String),

    #[error("point {0} lies outside the closed strip 0 <= Re z <= 1")]
    OutsideStrip(num_complex::Complex64),

    #[error("strip function must decay (lambda > 0) for a certified boundary supremum")]
    NoDecay,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("runtime admissibility check failed: {0}")]
    Admissibility(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects exponents outside `(1, ∞)`.
pub(crate) fn check_open_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::Exponent(p, "(1, inf)"))
    }
}

/// Rejects exponents outside `[1, ∞]`.
pub(crate) fn check_closed_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Exponent(p, "[1, inf]"))
    }
}

/// Conjugate exponent `q` with `1/p + 1/q = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub(crate) fn check_conjugate(p: f64, q: f64) -> Result<()> {
    if ((1.0 / p + 1.0 / q) - 1.0).abs() <= 1e-12 {
        Ok(())
    } else {
        Err(Error::NotConjugate { p, q })
    }
}

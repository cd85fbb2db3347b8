use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadratic form has all coefficients zero")]
    ZeroForm,
    #[error("quadratic form is singular (doubled Gram determinant is zero)")]
    SingularForm,
    #[error("special conic is degenerate (a*e^2 - d*e*b + f*b^2 = 0)")]
    DegenerateSpecialConic,
    #[error("matrix has determinant {det}, expected +1")]
    NotUnimodular { det: i128 },
    #[error("norm matrix is singular")]
    SingularNormMatrix,
    #[error("invalid norm entry: {0}")]
    InvalidNormEntry(String),
    #[error("vector is not primitive (gcd {gcd})")]
    NotPrimitive { gcd: u64 },
    #[error("zero vector not allowed")]
    ZeroVector,
    #[error(
        "no integer zero with sup-norm <= {cap} found; {verdict}",
        verdict = if *conclusive {
            "cap >= 3*<Q>, so the form has no rational zero (Cassels guarantee)"
        } else {
            "cap < 3*<Q>, search inconclusive"
        }
    )]
    ZeroNotFound { cap: i64, conclusive: bool },
    #[error("degenerate parameter: q(s,t) = 0")]
    DegenerateParameter,
    #[error("enumeration cap exceeded: {what} = {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: u128,
        cap: u128,
    },
    #[error("local density at p = {p} did not stabilize within level cap {level_cap}")]
    DensityNotStabilized { p: u64, level_cap: u32 },
    #[error("integration did not converge after {refinements} refinements ({context})")]
    NonConvergence {
        refinements: u32,
        context: &'static str,
    },
    #[error("tolerance {0} outside the accepted range")]
    ToleranceOutOfRange(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error(
        "coupling pair (eta={eta}, tau={tau}) is not critical: eta^2 - tau^2 - 4 = {defect:e}"
    )]
    NotCritical { eta: f64, tau: f64, defect: f64 },

    #[error("no sign change found for k={k}")]
    NoRoot { k: i64 },

    #[error("root refinement for k={k} did not converge after {iterations} iterations")]
    NonConvergence { k: i64, iterations: usize },

    #[error("denominator vanishes: {0}")]
    NearSingularDenominator(String),

    #[error("normalisation integral is not positive for k={k}")]
    NonPositiveNormArgument { k: i64 },

    #[error("step size underflow at r={r:e}")]
    StiffnessFailure { r: f64 },

    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("invalid form factor: {0}")]
    FormFactor(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("generator is singular: zero mode near eigenvalue {eigenvalue:.3e} (null vector {null_vector:?})")]
    Singular {
        eigenvalue: f64,
        null_vector: [f64; 4],
    },

    #[error(
        "eigenbasis ill-conditioned (condition {condition:.3e}); use the matrix-exponential solver"
    )]
    IllConditioned { condition: f64 },

    #[error("step size underflow at t = {t:.6e} (h = {h:.3e}, error estimate {err:.3e})")]
    StepUnderflow { t: f64, h: f64, err: f64 },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("empty detector geometry")]
    EmptyGeometry,

    #[error("zero excited population, beat contrast undefined")]
    ZeroPopulation,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

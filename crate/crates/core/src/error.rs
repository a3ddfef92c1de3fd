use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("near boundary |xi| = 6: xi = {xi}")]
    NearBoundary { xi: f64 },
    #[error("lens angle infeasible: phi = {phi}, bound = {bound}")]
    LensInfeasible { phi: f64, bound: f64 },
    #[error("integrator did not converge: {0}")]
    NonConvergence(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("singular nu at z = {z}: |r|^2 = {r2}")]
    SingularNu { z: f64, r2: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("instability detected at t = {t}: {msg}")]
    Instability { t: f64, msg: String },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

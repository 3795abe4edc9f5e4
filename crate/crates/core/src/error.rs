use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// |K| fell below the floor; the field magnitude estimate is 10^`log10_magnitude`.
    #[error("Cerenkov singularity: |K| = {k_abs:e} below floor, |E| ~ 1e{log10_magnitude:.1}")]
    CerenkovSingularity { k_abs: f64, log10_magnitude: f64 },

    /// β sits within the tangency threshold of a singular velocity.
    #[error("root count ambiguous near a singular velocity: {lower} or {upper}")]
    AmbiguousCount { lower: usize, upper: usize },

    #[error("not evaluable at any of {rungs} precision rungs: {last}")]
    NonEvaluable { rungs: usize, last: Box<Error> },

    #[error("finite-difference oracle invalid: {0}")]
    OracleInvalid(String),

    #[error("no bound orbit: Z = {z} is not attractive")]
    NoBoundOrbit { z: String },

    /// Momentum at or below m0·c, which a tachyon cannot have.
    #[error("turning point: |p| = {momentum} <= m0 c")]
    TurningPoint { momentum: f64 },

    #[error("ill-posed initial condition: {0}")]
    IllPosed(String),

    #[error("malformed file at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

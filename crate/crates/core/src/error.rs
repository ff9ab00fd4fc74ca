use thiserror::Error;

use crate::geometry::FourVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    /// `m^2 < 0` was sampled, so the square-root Hamiltonian is not real.
    #[error("reality violation: m^2 = {m2} < 0 at {at:?}")]
    Reality { m2: f64, at: FourVector },

    #[error("singular surface {surface} reached at {at:?}")]
    Singular {
        surface: &'static str,
        at: FourVector,
    },

    #[error("front-form momentum p_- vanished (p_- = {0})")]
    ZeroLongitudinalMomentum(f64),

    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    TooManySteps(usize),

    #[error("non-finite value produced at t = {0}")]
    NonFinite(f64),

    #[error("{0}")]
    Domain(String),

    #[error("all sample states are degenerate")]
    DegenerateSamples,

    #[error("form mismatch: {0}")]
    FormMismatch(String),

    #[error("root bracketing failed: {0}")]
    Bracketing(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the orbit running into a singular region
    /// (as opposed to bad input).
    pub fn is_runtime_singularity(&self) -> bool {
        matches!(
            self,
            Error::Reality { .. }
                | Error::Singular { .. }
                | Error::ZeroLongitudinalMomentum(_)
                | Error::StepUnderflow { .. }
                | Error::NonFinite(_)
        )
    }
}

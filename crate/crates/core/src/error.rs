use thiserror::Error;

#[derive(Debug, Error)]
pub enum ThermoError {
    #[error("temperature must be positive and finite, got {0}")]
    InvalidTemperature(f64),

    #[error("coupling gamma must be positive and finite, got {0}")]
    InvalidCoupling(f64),

    #[error("duration must be non-negative and finite, got {0}")]
    NegativeDuration(f64),

    #[error("Bloch vector ({x}, {y}, {z}) has norm {norm} > 1")]
    InvalidBlochVector { x: f64, y: f64, z: f64, norm: f64 },

    #[error("measurement angle phi = {0} outside [0, pi/4]")]
    PhiOutOfRange(f64),

    #[error("number of measurements must be at least 1")]
    ZeroMeasurements,

    #[error("n = {n} exceeds the enumeration budget of {max} measurements")]
    EnumerationBudget { n: usize, max: usize },

    #[error("outcome string has length {got}, protocol expects {expected}")]
    OutcomeLengthMismatch { expected: usize, got: usize },

    #[error("evolved state carries coherences (|r_x|={rx:e}, |r_y|={ry:e}); diagonal QFI does not apply")]
    CoherentState { rx: f64, ry: f64 },

    #[error("IID band width is zero at T = {temperature}; ratio undefined")]
    ZeroBandWidth { temperature: f64 },

    #[error("likelihood is flat over the prior range")]
    FlatLikelihood,

    #[error("prior range [{lo}, {hi}] must satisfy 0 < lo < hi")]
    InvalidPrior { lo: f64, hi: f64 },

    #[error("temperature grid [{t_min}, {t_max}] with {steps} steps is invalid")]
    InvalidGrid {
        t_min: f64,
        t_max: f64,
        steps: usize,
    },

    #[error("ensemble needs at least one state")]
    EmptyEnsemble,

    #[error("need at least {min} trials, got {got}")]
    TooFewTrials { min: usize, got: usize },

    #[error("Fisher information is zero; Cramer-Rao bound is unbounded")]
    ZeroFisherInformation,

    #[error("scheme mismatch: expected {expected}, got {got}")]
    SchemeMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("projective readout (phi = 0) required, got phi = {0}")]
    NotProjective(f64),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ThermoError>;

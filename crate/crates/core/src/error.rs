use thiserror::Error;

/// Errors raised by the simulator.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// failing computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max |M - M†| = {deviation:e})")]
    NonHermitian { deviation: f64 },
    #[error("state has an imaginary amplitude of magnitude {magnitude:e}; only real states are supported")]
    ComplexStateUnsupported { magnitude: f64 },
    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("coefficient matrix has negative determinant {det:e}; no decomposition into two Y-rotations exists")]
    ReflectedState { det: f64 },
    #[error("sharpness {mu} outside [0, π/4]")]
    InvalidSharpness { mu: f64 },
    #[error("outcome has probability {probability:e}, below the 1e-12 threshold")]
    ImpossibleOutcome { probability: f64 },
    #[error("entanglement angle is zero; the state is separable")]
    DegenerateState,
    #[error("history of length {len} exceeds the configured {steps} steps")]
    HistoryTooLong { len: usize, steps: usize },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("value {value} outside the domain [{low}, {high}]")]
    OutOfRange { value: f64, low: f64, high: f64 },
    #[error("setting index {0} out of range (expected 0 or 1)")]
    IndexOutOfRange(usize),
    #[error("no counts recorded for setting pair ({i}, {j})")]
    EmptyCell { i: usize, j: usize },
    #[error("count table layout is {found:?}, expected {expected:?}")]
    WrongLayout {
        expected: crate::montecarlo::Layout,
        found: crate::montecarlo::Layout,
    },
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
    #[error("cannot parse history {input:?}: {reason}")]
    HistoryParse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

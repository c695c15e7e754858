use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("user {user} is {distance:.3e} m from antenna {antenna}, below the 1e-3 m guard")]
    TooClose {
        antenna: usize,
        user: usize,
        distance: f64,
    },

    #[error("target SNR (rho) is not set")]
    MissingRho,

    #[error("average path gain is zero; cannot convert SNR to transmit power")]
    ZeroPathGain,

    #[error("active set is empty")]
    EmptyActiveSet,

    #[error("invalid active set: {0}")]
    InvalidActiveSet(String),

    #[error("zero-forcing needs at least {users} active antennas, got {antennas}")]
    ZfInfeasible { antennas: usize, users: usize },

    #[error("channel Gram matrix is rank deficient (condition number {condition:.3e})")]
    RankDeficient { condition: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("user {0} has zero total path gain")]
    ZeroColumnSum(usize),

    #[error("active antenna count {ms} outside [1, {m}]")]
    MsOutOfRange { ms: usize, m: usize },

    #[error("pilot length {tau} exceeds coherence block {block}")]
    PilotTooLong { tau: f64, block: f64 },

    #[error("total consumed power must be positive, got {0}")]
    NonPositivePower(f64),

    #[error("binomial approximation breaks down at Ms = {ms}: F1 = {f1:.4e}")]
    ApproximationBreakdown { ms: f64, f1: f64 },

    #[error("analytic search interval is empty: K = {users} exceeds validity boundary {boundary}")]
    EmptySearchInterval { users: usize, boundary: usize },
}

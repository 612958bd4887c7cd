use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pilot count {pilots} is not an integer (alpha = {alpha}, n = {n})")]
    InvalidPilotCount { alpha: f64, n: u32, pilots: f64 },

    #[error("pilot count {pilots} exceeds frame length {n}")]
    TooManyPilots { pilots: u32, n: u32 },

    #[error("invalid amplitude range: h_min = {h_min}, h_max = {h_max}")]
    InvalidRange { h_min: f64, h_max: f64 },

    #[error("{name} = {value} must lie strictly inside (0, 1)")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("{name} = {value} must be positive")]
    NonPositiveSnr { name: &'static str, value: f64 },

    #[error("{name} must be at least 1")]
    ZeroCount { name: &'static str },

    #[error("message length b_M = {0} must be a non-negative integer")]
    InvalidMessageLength(f64),

    #[error("channel check needs at least one pilot symbol")]
    NoPilots,

    #[error("{function}: argument {value} outside domain")]
    Domain { function: &'static str, value: f64 },

    #[error("{0} did not converge")]
    Convergence(&'static str),

    #[error("degenerate interval [{0}, {0}]")]
    DegenerateInterval(f64),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid optimization grid: {0}")]
    InvalidGrid(String),
}

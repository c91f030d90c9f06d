use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
    #[error("site {site} out of range for width {width}")]
    SiteOutOfRange { site: usize, width: usize },
    #[error("gate sites collide at {0}")]
    SiteCollision(usize),
    #[error("invalid Clifford images: {0}")]
    InvalidGate(&'static str),
    #[error("swap rate {0} outside [0, 1]")]
    InvalidRate(f64),
    #[error("local dimension must be at least 2, got {0}")]
    InvalidDimension(u32),
    #[error("system size {0} must be even and nonzero")]
    InvalidSize(usize),
    #[error("invalid block size k = {k} for N = {n}")]
    InvalidBlock { k: usize, n: usize },
    #[error("empty initial condition")]
    EmptyInitialCondition,
    #[error("operation requires {expected}, state is {actual}")]
    WrongCase {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("oracle size guard: N = {n} exceeds {max}")]
    OracleTooLarge { n: usize, max: usize },
    #[error("dense conjugation result is not a Pauli string")]
    NotAPauli,
    #[error("nonpositive value {value} at t = {t} inside fit window")]
    NonPositive { t: f64, value: f64 },
    #[error("fit window [{lo}, {hi}] holds {points} points, need at least {needed}")]
    WindowTooSmall {
        lo: f64,
        hi: f64,
        points: usize,
        needed: usize,
    },
    #[error("no sign change in curvature across the p grid")]
    NoCurvatureSignChange,
    #[error("mean-field densities vanish at p = {p} (threshold {p_c})")]
    PastMeanFieldThreshold { p: f64, p_c: f64 },
    #[error("ensemble has no surviving trajectories in the window")]
    NoSurvivors,
    #[error("{0}")]
    Invalid(String),
}

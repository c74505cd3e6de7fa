//! Error type shared by the solver and the verification harness.

use thiserror::Error;

/// What the per-step state monitor found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonitorKind {
    /// Density dropped to zero or below; the quasi-linear system is singular there.
    NonPositiveDensity { rho: f64 },
    /// |v| reached the sound speed; the subsonic (hyperbolic) regime is lost.
    SupersonicVelocity { v: f64, sound_speed: f64 },
}

impl std::fmt::Display for MonitorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MonitorKind::NonPositiveDensity { rho } => write!(f, "non-positive density rho = {rho}"),
            MonitorKind::SupersonicVelocity { v, sound_speed } => {
                write!(f, "|v| = {} reached the sound speed c = {}", v.abs(), sound_speed)
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid parameter {name} = {value}: requires {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("non-positive density rho = {value} at node {node}")]
    NonPositiveDensity { node: usize, value: f64 },

    #[error("array of length {len} is too short for central differences (need >= 3)")]
    StencilTooShort { len: usize },

    #[error("grid: L/dx = {ratio} is not an integer (L = {length_half}, dx = {dx})")]
    NonIntegerGrid { length_half: f64, dx: f64, ratio: f64 },

    #[error("CFL violation: Courant number {courant} exceeds 1 (dt = {dt}, dx = {dx})")]
    CflViolation { courant: f64, dt: f64, dx: f64 },

    #[error("boundary update degenerate at the {side} end: |2 P(end) - P(neighbor)| = {denominator} below {threshold}")]
    BoundaryDegeneracy {
        side: &'static str,
        denominator: f64,
        threshold: f64,
    },

    #[error("valve phase error: {0}")]
    PhaseError(String),

    #[error("numerical monitor abort at step {step} (t = {t}), node {node}: {kind}")]
    MonitorViolation {
        step: u64,
        t: f64,
        node: usize,
        kind: MonitorKind,
    },

    #[error("characteristics cross at t* = {t_star}; the classical solution is invalid at t = {t}")]
    CharacteristicsCross { t: f64, t_star: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("grids are not nested: {0}")]
    GridAlignment(String),

    #[error("test function support touches the domain boundary: {0}")]
    SupportOutsideDomain(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;

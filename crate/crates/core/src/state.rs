//! Solution state at a single time level: per-node density and velocity.

use crate::error::{MonitorKind, Result, SolverError};
use crate::params::FluidParams;

/// Which boundary regime the state lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Valve open: domain `[0, 2L]`, reservoirs at both ends.
    PreClosure,
    /// Valve closed: domain `[0, L]`, reservoir left, hard wall at `x = L`.
    PostClosure,
}

/// Density/velocity fields at one time level.
///
/// Construction rejects non-positive densities outright; the hyperbolicity
/// condition `|v| < c` is a monitor status checked by the driver each step,
/// not a construction invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    /// Current time [s].
    pub t: f64,
    /// Density per node [kg/m^3].
    pub rho: Vec<f64>,
    /// Velocity per node [m/s].
    pub v: Vec<f64>,
    pub phase: Phase,
}

impl State {
    pub fn new(t: f64, rho: Vec<f64>, v: Vec<f64>, phase: Phase) -> Result<Self> {
        assert_eq!(rho.len(), v.len(), "rho and v must have the same node count");
        if let Some((node, &value)) = rho.iter().enumerate().find(|(_, r)| !(**r > 0.0)) {
            return Err(SolverError::NonPositiveDensity { node, value });
        }
        Ok(Self { t, rho, v, phase })
    }

    /// Uniform state, mostly for tests and the friction-decay studies.
    pub fn uniform(t: f64, n_nodes: usize, rho: f64, v: f64, phase: Phase) -> Result<Self> {
        Self::new(t, vec![rho; n_nodes], vec![v; n_nodes], phase)
    }

    pub fn n_nodes(&self) -> usize {
        self.rho.len()
    }

    /// First node violating the subsonic condition `|v| < c`, if any.
    pub fn monitor(&self, params: &FluidParams) -> Option<(usize, MonitorKind)> {
        let c = params.sound_speed();
        for (j, (&r, &u)) in self.rho.iter().zip(&self.v).enumerate() {
            if !(r > 0.0) {
                return Some((j, MonitorKind::NonPositiveDensity { rho: r }));
            }
            if u.abs() >= c {
                return Some((j, MonitorKind::SupersonicVelocity { v: u, sound_speed: c }));
            }
        }
        None
    }

    pub fn max_abs_velocity(&self) -> f64 {
        self.v.iter().fold(0.0, |m, &u| m.max(u.abs()))
    }
}

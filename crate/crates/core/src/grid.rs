//! Uniform node-centered mesh over the doubled pipe `[0, 2L]` with the valve at `x = L`.

use crate::error::{Result, SolverError};

/// Uniform 1-D mesh. Nodes sit at `x_j = j dx`, `j = 0..=2 N`, where `N = L/dx`
/// must be an integer so the valve coincides with node `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// Cell width [m].
    pub dx: f64,
    /// Half pipe length L [m]; the full pre-closure domain is `[0, 2L]`.
    pub length_half: f64,
    /// Node index of the valve, `N = L/dx`.
    pub valve_index: usize,
}

impl Grid {
    pub fn new(length_half: f64, dx: f64) -> Result<Self> {
        if !(length_half > 0.0) || !length_half.is_finite() {
            return Err(SolverError::InvalidParameter {
                name: "length_half",
                value: length_half,
                constraint: "L > 0",
            });
        }
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(SolverError::InvalidParameter { name: "dx", value: dx, constraint: "dx > 0" });
        }
        let ratio = length_half / dx;
        let n = ratio.round();
        if n < 2.0 || (n * dx - length_half).abs() > 1e-9 * length_half {
            return Err(SolverError::NonIntegerGrid { length_half, dx, ratio });
        }
        Ok(Self { dx, length_half, valve_index: n as usize })
    }

    /// Node count over the full pre-closure domain `[0, 2L]`: `2N + 1`.
    pub fn n_nodes_full(&self) -> usize {
        2 * self.valve_index + 1
    }

    /// Node count over the truncated post-closure domain `[0, L]`: `N + 1`.
    pub fn n_nodes_half(&self) -> usize {
        self.valve_index + 1
    }

    /// Coordinate of node `j`.
    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    /// Nearest node to coordinate `x` (clamped to the full domain).
    pub fn nearest_node(&self, x: f64) -> usize {
        let j = (x / self.dx).round();
        j.clamp(0.0, (self.n_nodes_full() - 1) as f64) as usize
    }
}

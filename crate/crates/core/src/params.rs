//! Physical constants of the pipe/fluid system and the linear pressure law.
//!
//! All quantities are SI: meters, kilograms, seconds, Pascals.

use crate::error::{Result, SolverError};

/// Physical constants of the pipeline system.
///
/// The pressure is linear in the density, `p = p_a + K (rho - rho_a) / rho_a`,
/// so `c = sqrt(K / rho_a)` is the (constant) sound speed. The quadratic wall
/// friction enters the momentum balance as `-c_f v|v| / (2 D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    /// Bulk-stiffness constant [Pa].
    pub bulk_stiffness: f64,
    /// Reference density [kg/m^3].
    pub rho_a: f64,
    /// Atmospheric pressure [Pa].
    pub p_a: f64,
    /// Friction factor [-].
    pub c_f: f64,
    /// Pipe diameter [m].
    pub diameter: f64,
}

impl FluidParams {
    pub fn new(bulk_stiffness: f64, rho_a: f64, p_a: f64, c_f: f64, diameter: f64) -> Result<Self> {
        let check = |name: &'static str, value: f64, ok: bool, constraint: &'static str| {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(SolverError::InvalidParameter { name, value, constraint })
            }
        };
        check("K", bulk_stiffness, bulk_stiffness > 0.0, "K > 0")?;
        check("rho_a", rho_a, rho_a > 0.0, "rho_a > 0")?;
        check("p_a", p_a, p_a >= 0.0, "p_a >= 0")?;
        check("c_f", c_f, c_f >= 0.0, "c_f >= 0")?;
        check("D", diameter, diameter > 0.0, "D > 0")?;
        Ok(Self { bulk_stiffness, rho_a, p_a, c_f, diameter })
    }

    /// Sound speed `c = sqrt(K / rho_a)` [m/s].
    pub fn sound_speed(&self) -> f64 {
        (self.bulk_stiffness / self.rho_a).sqrt()
    }

    /// Friction coefficient `C = c_f / (2 D)` [1/m].
    pub fn friction_coefficient(&self) -> f64 {
        self.c_f / (2.0 * self.diameter)
    }

    /// `K / rho_a`, the square of the sound speed [m^2/s^2].
    pub fn stiffness_ratio(&self) -> f64 {
        self.bulk_stiffness / self.rho_a
    }

    /// Linear pressure law `p(rho) = p_a + K (rho - rho_a) / rho_a` [Pa].
    ///
    /// Negative pressures are allowed by the linear law and simply reported.
    pub fn pressure_of_density(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(SolverError::InvalidParameter {
                name: "rho",
                value: rho,
                constraint: "rho > 0",
            });
        }
        Ok(self.p_a + self.bulk_stiffness * (rho - self.rho_a) / self.rho_a)
    }
}

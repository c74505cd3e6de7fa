//! Full experiment description: geometry, discretization, initial and boundary data.

use crate::error::{Result, SolverError};
use crate::grid::Grid;
use crate::params::FluidParams;
use crate::state::{Phase, State};

/// Initial profile as a function of x. Kept to closed forms so scenarios can
/// round-trip through config files exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Constant(f64),
    /// `base + amplitude * exp(-((x - center)/width)^2)`.
    Gaussian {
        base: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Constant(value) => value,
            Profile::Gaussian { base, amplitude, center, width } => {
                let s = (x - center) / width;
                base + amplitude * (-s * s).exp()
            }
        }
    }
}

/// Everything needed to run one transient: fluid constants, mesh, Courant
/// number, valve-closure time, horizon, initial fields, reservoir densities.
///
/// `t_close >= t_end` means the valve never closes within the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: FluidParams,
    /// Half pipe length L [m]; the valve sits at x = L on the `[0, 2L]` pipe.
    pub length_half: f64,
    /// Cell width [m].
    pub dx: f64,
    /// Target Courant number `c dt / dx`, in (0, 1].
    pub courant: f64,
    /// Valve closure time t_1 [s].
    pub t_close: f64,
    /// Horizon T [s].
    pub t_end: f64,
    pub rho_init: Profile,
    pub v_init: Profile,
    /// Reservoir density at x = 0 [kg/m^3].
    pub rho_left: f64,
    /// Reservoir density at x = 2L [kg/m^3] (unused after closure).
    pub rho_right: f64,
}

impl Scenario {
    /// Validates the cross-field invariants and returns the mesh.
    pub fn validate(&self) -> Result<Grid> {
        let check = |name: &'static str, value: f64, ok: bool, constraint: &'static str| {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(SolverError::InvalidParameter { name, value, constraint })
            }
        };
        check("courant", self.courant, self.courant > 0.0 && self.courant <= 1.0, "0 < courant <= 1")?;
        check("t_close", self.t_close, self.t_close > 0.0, "t_close > 0")?;
        check("t_end", self.t_end, self.t_end > 0.0, "t_end > 0")?;
        check("rho_left", self.rho_left, self.rho_left > 0.0, "rho_left > 0")?;
        check("rho_right", self.rho_right, self.rho_right > 0.0, "rho_right > 0")?;
        Grid::new(self.length_half, self.dx)
    }

    /// Samples the initial profiles on the full `[0, 2L]` mesh.
    pub fn initial_state(&self, grid: &Grid) -> Result<State> {
        let n = grid.n_nodes_full();
        let rho = (0..n).map(|j| self.rho_init.eval(grid.x(j))).collect();
        let v = (0..n).map(|j| self.v_init.eval(grid.x(j))).collect();
        State::new(0.0, rho, v, Phase::PreClosure)
    }

    /// The reference water-hammer experiment: 20 m half pipe, 0.2 m diameter,
    /// K = 2.5e8 Pa, rho_a = 1000 kg/m^3, c_f = 2, p_a = 1.01e5 Pa, uniform
    /// (rho, v) = (1000, 1), reservoirs at 1000, closure at 0.04 s, horizon
    /// 0.8 s, dx = 0.1 m, Courant 0.5.
    pub fn reference_waterhammer() -> Self {
        Scenario {
            params: FluidParams::new(2.5e8, 1000.0, 1.01e5, 2.0, 0.2).expect("valid constants"),
            length_half: 20.0,
            dx: 0.1,
            courant: 0.5,
            t_close: 0.04,
            t_end: 0.8,
            rho_init: Profile::Constant(1000.0),
            v_init: Profile::Constant(1.0),
            rho_left: 1000.0,
            rho_right: 1000.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_scenario_is_valid() {
        let s = Scenario::reference_waterhammer();
        let grid = s.validate().unwrap();
        assert_eq!(grid.n_nodes_full(), 401);
        assert_eq!(s.params.sound_speed(), 500.0);
        assert_eq!(s.params.friction_coefficient(), 5.0);
    }

    #[test]
    fn courant_above_one_is_rejected() {
        let s = Scenario { courant: 1.2, ..Scenario::reference_waterhammer() };
        assert!(s.validate().is_err());
    }

    #[test]
    fn no_closure_horizon_is_allowed() {
        // t_close beyond t_end just means the valve never closes.
        let s = Scenario { t_close: 2.0, ..Scenario::reference_waterhammer() };
        assert!(s.validate().is_ok());
    }

    #[test]
    fn non_positive_reservoir_density_is_rejected() {
        let s = Scenario { rho_left: 0.0, ..Scenario::reference_waterhammer() };
        assert!(s.validate().is_err());
        let s = Scenario { rho_right: -1.0, ..Scenario::reference_waterhammer() };
        assert!(s.validate().is_err());
    }

    #[test]
    fn gaussian_profile_evaluates() {
        let p = Profile::Gaussian { base: 1000.0, amplitude: 2.0, center: 20.0, width: 2.0 };
        assert_eq!(p.eval(20.0), 1002.0);
        assert!((p.eval(22.0) - (1000.0 + 2.0 * (-1.0f64).exp())).abs() < 1e-12);
        assert!((p.eval(0.0) - 1000.0).abs() < 1e-12);
    }

    #[test]
    fn initial_state_samples_profiles() {
        let s = Scenario::reference_waterhammer();
        let grid = s.validate().unwrap();
        let state = s.initial_state(&grid).unwrap();
        assert_eq!(state.n_nodes(), 401);
        assert!(state.rho.iter().all(|&r| r == 1000.0));
        assert!(state.v.iter().all(|&u| u == 1.0));
    }
}

//! Boundary closures: reservoirs while the valve is open, the closure event,
//! and the hard wall afterwards.
//!
//! The reservoir ends pin the density and extrapolate the velocity from the
//! discrete mass balance at the wall, evaluated at the new time level:
//!
//! ```text
//! V(t+dt, 0)  = P(t+dt, 0)  V(t+dt, dx)     / (2 P(t+dt, 0)  - P(t+dt, dx))
//! V(t+dt, 2L) = P(t+dt, 2L) V(t+dt, 2L-dx)  / (2 P(t+dt, 2L) - P(t+dt, 2L-dx))
//! ```
//!
//! After closure the left end keeps the reservoir formula while the valve end
//! enforces `v(t, L) = 0`; the momentum balance then forces `d_x rho(t, L) = 0`,
//! realized as the copy `P(t, L) = P(t, L - dx)`.

use crate::error::{Result, SolverError};
use crate::params::FluidParams;
use crate::state::{Phase, State};

/// Reservoir data for the active phase. After closure the right reservoir is
/// gone along with the right half of the pipe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    pub phase: Phase,
    /// Reservoir density at x = 0 [kg/m^3].
    pub rho_left: f64,
    /// Reservoir density at x = 2L [kg/m^3]; ignored post-closure.
    pub rho_right: f64,
}

fn reservoir_velocity(
    rho_end: f64,
    rho_neighbor: f64,
    v_neighbor: f64,
    params: &FluidParams,
    side: &'static str,
) -> Result<f64> {
    let denominator = 2.0 * rho_end - rho_neighbor;
    let threshold = 1e-9 * params.rho_a;
    if denominator.abs() < threshold {
        return Err(SolverError::BoundaryDegeneracy { side, denominator, threshold });
    }
    Ok(rho_end * v_neighbor / denominator)
}

/// Fills both boundary nodes of a freshly updated pre-closure state.
pub fn apply_pre_closure(state: &mut State, spec: &BoundarySpec, params: &FluidParams) -> Result<()> {
    debug_assert_eq!(state.phase, Phase::PreClosure);
    let last = state.n_nodes() - 1;
    state.rho[0] = spec.rho_left;
    state.rho[last] = spec.rho_right;
    state.v[0] = reservoir_velocity(state.rho[0], state.rho[1], state.v[1], params, "left")?;
    state.v[last] =
        reservoir_velocity(state.rho[last], state.rho[last - 1], state.v[last - 1], params, "right")?;
    Ok(())
}

/// Fills the boundary nodes of a freshly updated post-closure state: reservoir
/// formula on the left, `v = 0` and the density copy at the valve.
pub fn apply_post_closure(state: &mut State, spec: &BoundarySpec, params: &FluidParams) -> Result<()> {
    debug_assert_eq!(state.phase, Phase::PostClosure);
    let last = state.n_nodes() - 1;
    state.rho[0] = spec.rho_left;
    state.v[0] = reservoir_velocity(state.rho[0], state.rho[1], state.v[1], params, "left")?;
    state.v[last] = 0.0;
    state.rho[last] = state.rho[last - 1];
    Ok(())
}

/// The valve-closure event at `t = t_close`: restricts the state to `[0, L]`
/// (the left `N + 1` nodes), zeroes the velocity at the valve and copies the
/// neighbor density there so `d_x rho(t_close, L) = 0` holds from the first
/// post-closure level on.
///
/// Returns the new state together with the pre-closure central-difference
/// value of `d_x rho` at the valve, which the switched problem assumes to be
/// zero in the limit but a generic pre-closure state does not satisfy.
pub fn close_valve(state: State, t_close: f64, dt: f64, dx: f64) -> Result<(State, f64)> {
    if state.phase != Phase::PreClosure {
        return Err(SolverError::PhaseError(
            "close_valve called on a state whose valve is already closed".into(),
        ));
    }
    if (state.t - t_close).abs() > 0.5 * dt {
        return Err(SolverError::PhaseError(format!(
            "close_valve called at t = {} but t_close = {t_close} (dt = {dt})",
            state.t
        )));
    }
    let n_full = state.n_nodes();
    let valve = (n_full - 1) / 2;
    let grad_rho_at_valve = (state.rho[valve + 1] - state.rho[valve - 1]) / (2.0 * dx);

    let mut rho = state.rho;
    let mut v = state.v;
    rho.truncate(valve + 1);
    v.truncate(valve + 1);
    v[valve] = 0.0;
    rho[valve] = rho[valve - 1];
    let closed = State::new(state.t, rho, v, Phase::PostClosure)?;
    Ok((closed, grad_rho_at_valve))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> FluidParams {
        FluidParams::new(2.5e8, 1000.0, 1.01e5, 2.0, 0.2).unwrap()
    }

    fn spec(phase: Phase) -> BoundarySpec {
        BoundarySpec { phase, rho_left: 1000.0, rho_right: 1000.0 }
    }

    #[test]
    fn uniform_density_copies_neighbor_velocity() {
        // P/(2P - P) = 1, so the boundary velocity equals its neighbor.
        let mut state =
            State::new(0.0, vec![1000.0; 5], vec![0.3, 0.7, 0.5, 0.2, 0.9], Phase::PreClosure).unwrap();
        apply_pre_closure(&mut state, &spec(Phase::PreClosure), &params()).unwrap();
        assert_eq!(state.v[0], 0.7);
        assert_eq!(state.v[4], 0.2);
        assert!(state.rho.iter().all(|&r| r == 1000.0));
    }

    #[test]
    fn reservoir_velocity_formula_value() {
        // P(0) = 1000, P(dx) = 999, V(dx) = 1 -> V(0) = 1000/1001.
        let mut state =
            State::new(0.0, vec![1000.0, 999.0, 1000.0], vec![0.0, 1.0, 0.0], Phase::PreClosure)
                .unwrap();
        let spec = BoundarySpec { phase: Phase::PreClosure, rho_left: 1000.0, rho_right: 1000.0 };
        apply_pre_closure(&mut state, &spec, &params()).unwrap();
        assert!((state.v[0] - 1000.0 / 1001.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_denominator_is_an_error() {
        // P(0) = 1000, P(dx) = 2000 -> 2 P(0) - P(dx) = 0.
        let mut state =
            State::new(0.0, vec![1000.0, 2000.0, 1000.0], vec![0.0, 1.0, 0.0], Phase::PreClosure)
                .unwrap();
        let err = apply_pre_closure(&mut state, &spec(Phase::PreClosure), &params());
        assert!(matches!(err, Err(SolverError::BoundaryDegeneracy { side: "left", .. })));
    }

    #[test]
    fn pre_closure_boundaries_are_exact_on_the_uniform_state() {
        let mut state = State::uniform(0.0, 9, 1000.0, 1.0, Phase::PreClosure).unwrap();
        apply_pre_closure(&mut state, &spec(Phase::PreClosure), &params()).unwrap();
        for j in 0..9 {
            assert!((state.rho[j] - 1000.0).abs() <= 1e-13 * 1000.0);
            assert!((state.v[j] - 1.0).abs() <= 1e-13);
        }
    }

    #[test]
    fn close_valve_truncates_and_overwrites() {
        let state = State::uniform(0.04, 9, 1000.0, 0.8, Phase::PreClosure).unwrap();
        let (closed, grad) = close_valve(state, 0.04, 1e-4, 0.1).unwrap();
        assert_eq!(closed.n_nodes(), 5);
        assert_eq!(closed.phase, Phase::PostClosure);
        assert_eq!(closed.v[4], 0.0);
        assert!(closed.v[..4].iter().all(|&u| u == 0.8));
        assert!(closed.rho.iter().all(|&r| r == 1000.0));
        assert_eq!(grad, 0.0);
    }

    #[test]
    fn close_valve_copies_neighbor_density_at_the_valve() {
        let rho: Vec<f64> = (0..9).map(|j| 1000.0 + j as f64).collect();
        let state = State::new(0.04, rho, vec![0.5; 9], Phase::PreClosure).unwrap();
        let (closed, grad) = close_valve(state, 0.04, 1e-4, 0.1).unwrap();
        // Node 4 is the valve; it takes node 3's density.
        assert_eq!(closed.rho[4], 1003.0);
        // rho rises by 1 per node, i.e. a slope of 1/dx = 10 per meter.
        assert!((grad - 10.0).abs() < 1e-12);
    }

    #[test]
    fn close_valve_rejects_wrong_phase_or_time() {
        let state = State::uniform(0.04, 9, 1000.0, 0.8, Phase::PreClosure).unwrap();
        let (closed, _) = close_valve(state, 0.04, 1e-4, 0.1).unwrap();
        // Second closure: wrong phase.
        let again = close_valve(closed, 0.04, 1e-4, 0.1);
        assert!(matches!(again, Err(SolverError::PhaseError(_))));
        // Too early: t far from t_close.
        let early = State::uniform(0.01, 9, 1000.0, 0.8, Phase::PreClosure).unwrap();
        assert!(matches!(close_valve(early, 0.04, 1e-4, 0.1), Err(SolverError::PhaseError(_))));
    }

    #[test]
    fn post_closure_wall_conditions() {
        let mut state = State::new(
            0.1,
            vec![1000.0, 1010.0, 1020.0, 1030.0, 990.0],
            vec![0.1, 0.2, 0.3, 0.4, 0.5],
            Phase::PostClosure,
        )
        .unwrap();
        apply_post_closure(&mut state, &spec(Phase::PostClosure), &params()).unwrap();
        assert_eq!(state.v[4], 0.0);
        assert_eq!(state.rho[4], 1030.0);
        assert_eq!(state.rho[0], 1000.0);
    }

    #[test]
    fn valve_density_tracks_a_rising_neighbor_with_one_node_lag() {
        // Feed a compression ramp into the neighbor node step by step; the
        // valve node must reproduce the neighbor's current value each time.
        let mut state = State::new(
            0.0,
            vec![1000.0, 1000.0, 1000.0, 1000.0],
            vec![0.0; 4],
            Phase::PostClosure,
        )
        .unwrap();
        let mut seen = Vec::new();
        for k in 0..5 {
            state.rho[2] = 1000.0 + 25.0 * k as f64;
            apply_post_closure(&mut state, &spec(Phase::PostClosure), &params()).unwrap();
            seen.push(state.rho[3]);
        }
        assert_eq!(seen, vec![1000.0, 1025.0, 1050.0, 1075.0, 1100.0]);
    }
}

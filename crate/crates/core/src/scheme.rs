//! The nonlinear Lax-Wendroff update kernel.
//!
//! The quasi-linear system for `u = (rho, v)` is
//!
//! ```text
//! d_t rho = -rho d_x v - v d_x rho
//! d_t v   = -v d_x v - (K/rho_a) (1/rho) d_x rho - C v|v|,      C = c_f / (2D)
//! ```
//!
//! The step advances each interior node by the second-order Taylor expansion
//! `u(t + dt) = u + dt d_t u + dt^2/2 d_t^2 u`, with every time derivative
//! rewritten in spatial derivatives (substituting the first-order relations
//! into their own time derivative) and the spatial derivatives replaced by
//! central differences. Boundary nodes are left to the boundary closures.
//!
//! The derivative of `|v|` is taken with `sign(0) = 0`, so every friction term
//! vanishes at rest and the kernel stays continuous across `v = 0`.

use crate::error::{Result, SolverError};
use crate::params::FluidParams;
use crate::state::State;

/// Slack on the Courant check so `courant = 1` survives `dt = dx / c` roundoff.
const CFL_SLACK: f64 = 1e-9;

/// Which interior update a march uses. The first-order kernel exists so the
/// order-of-accuracy harness can demonstrate that it discriminates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    LaxWendroff,
    FirstOrderReference,
}

/// First and second central differences per node; entries at the two boundary
/// nodes are left NaN on purpose (the stencil is undefined there).
#[derive(Debug, Clone)]
pub struct DerivativeStencil {
    pub d1_rho: Vec<f64>,
    pub d1_v: Vec<f64>,
    pub d2_rho: Vec<f64>,
    pub d2_v: Vec<f64>,
}

impl DerivativeStencil {
    pub fn compute(state: &State, dx: f64) -> Result<Self> {
        let (d1_rho, d2_rho) = central_diffs(&state.rho, dx)?;
        let (d1_v, d2_v) = central_diffs(&state.v, dx)?;
        Ok(Self { d1_rho, d1_v, d2_rho, d2_v })
    }
}

/// First and second analytic time derivatives per node (NaN at the boundary nodes).
#[derive(Debug, Clone)]
pub struct TimeDerivatives {
    pub dt_rho: Vec<f64>,
    pub dt_v: Vec<f64>,
    pub dtt_rho: Vec<f64>,
    pub dtt_v: Vec<f64>,
}

impl TimeDerivatives {
    pub fn compute(state: &State, stencil: &DerivativeStencil, params: &FluidParams) -> Result<Self> {
        let (dt_rho, dt_v) = first_time_derivs(state, stencil, params)?;
        let (dtt_rho, dtt_v) = second_time_derivs(state, stencil, params)?;
        Ok(Self { dt_rho, dt_v, dtt_rho, dtt_v })
    }
}

/// Central first and second differences of one nodal array.
///
/// `first[j] = (a[j+1] - a[j-1]) / (2 dx)`, `second[j] = (a[j+1] - 2 a[j] + a[j-1]) / dx^2`
/// on interior nodes; boundary entries are NaN.
pub fn central_diffs(values: &[f64], dx: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = values.len();
    if n < 3 {
        return Err(SolverError::StencilTooShort { len: n });
    }
    let mut first = vec![f64::NAN; n];
    let mut second = vec![f64::NAN; n];
    let inv_2dx = 1.0 / (2.0 * dx);
    let inv_dx2 = 1.0 / (dx * dx);
    for j in 1..n - 1 {
        first[j] = (values[j + 1] - values[j - 1]) * inv_2dx;
        second[j] = (values[j + 1] - 2.0 * values[j] + values[j - 1]) * inv_dx2;
    }
    Ok((first, second))
}

/// `(d_t rho, d_t v)` on interior nodes from the quasi-linear system.
pub fn first_time_derivs(
    state: &State,
    stencil: &DerivativeStencil,
    params: &FluidParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = state.n_nodes();
    let kappa = params.stiffness_ratio();
    let fric = params.friction_coefficient();
    let mut dt_rho = vec![f64::NAN; n];
    let mut dt_v = vec![f64::NAN; n];
    for j in 1..n - 1 {
        let rho = state.rho[j];
        if !(rho > 0.0) {
            return Err(SolverError::NonPositiveDensity { node: j, value: rho });
        }
        let v = state.v[j];
        let rx = stencil.d1_rho[j];
        let vx = stencil.d1_v[j];
        dt_rho[j] = -rho * vx - v * rx;
        dt_v[j] = -v * vx - kappa * rx / rho - fric * v * v.abs();
    }
    Ok((dt_rho, dt_v))
}

/// `(d_t^2 rho, d_t^2 v)` on interior nodes.
///
/// Obtained by differentiating the first-order relations in time and
/// substituting them back, with `d|v|/dt = sign(v) dv/dt` and `sign(0) = 0`:
///
/// ```text
/// d_t^2 rho = 2 rho (d_x v)^2 + 2 rho v d_x^2 v + 4 v d_x v d_x rho
///           + (K/rho_a + v^2) d_x^2 rho + 2 C |v| rho d_x v + C v|v| d_x rho
/// d_t^2 v   = 2 v (d_x v)^2 + (K/rho_a + v^2) d_x^2 v + 5 C v|v| d_x v
///           + (2K/(rho_a rho)) d_x rho d_x v - (2K v/(rho_a rho^2)) (d_x rho)^2
///           + (2K v/(rho_a rho)) d_x^2 rho + 2 C |v| (K/(rho_a rho)) d_x rho
///           + 2 C^2 v^3
/// ```
///
/// The last source term carries `C^2`: on a spatially uniform state the system
/// reduces to `v' = -C v|v|`, whose second derivative is `2 C^2 v^3` for
/// `v > 0`, and the kernel's second-order accuracy on the friction-decay
/// problem hinges on that factor.
pub fn second_time_derivs(
    state: &State,
    stencil: &DerivativeStencil,
    params: &FluidParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = state.n_nodes();
    let kappa = params.stiffness_ratio();
    let fric = params.friction_coefficient();
    let mut dtt_rho = vec![f64::NAN; n];
    let mut dtt_v = vec![f64::NAN; n];
    for j in 1..n - 1 {
        let rho = state.rho[j];
        if !(rho > 0.0) {
            return Err(SolverError::NonPositiveDensity { node: j, value: rho });
        }
        let v = state.v[j];
        let av = v.abs();
        let rx = stencil.d1_rho[j];
        let vx = stencil.d1_v[j];
        let rxx = stencil.d2_rho[j];
        let vxx = stencil.d2_v[j];

        dtt_rho[j] = 2.0 * rho * vx * vx
            + 2.0 * rho * v * vxx
            + 4.0 * v * vx * rx
            + (kappa + v * v) * rxx
            + 2.0 * fric * av * rho * vx
            + fric * v * av * rx;

        dtt_v[j] = 2.0 * v * vx * vx
            + (kappa + v * v) * vxx
            + 5.0 * fric * v * av * vx
            + 2.0 * kappa / rho * rx * vx
            - 2.0 * kappa * v / (rho * rho) * rx * rx
            + 2.0 * kappa * v / rho * rxx
            + 2.0 * fric * av * kappa / rho * rx
            + 2.0 * fric * fric * v * v * v;
    }
    Ok((dtt_rho, dtt_v))
}

/// Largest stable time step for a target Courant number: `dt = courant dx / c`.
pub fn cfl_max_dt(params: &FluidParams, dx: f64, courant: f64) -> Result<f64> {
    if !(courant > 0.0 && courant <= 1.0) || !courant.is_finite() {
        return Err(SolverError::InvalidParameter {
            name: "courant",
            value: courant,
            constraint: "0 < courant <= 1",
        });
    }
    Ok(courant * dx / params.sound_speed())
}

/// One Lax-Wendroff step on the interior nodes; boundary nodes keep their old
/// values for the boundary closures to overwrite. Refuses time steps whose
/// Courant number `c dt / dx` exceeds 1.
pub fn lw_interior_step(state: &State, dt: f64, dx: f64, params: &FluidParams) -> Result<State> {
    let courant = params.sound_speed() * dt / dx;
    if courant > 1.0 + CFL_SLACK {
        return Err(SolverError::CflViolation { courant, dt, dx });
    }
    lw_interior_step_unchecked(state, dt, dx, params)
}

/// The Lax-Wendroff step without the CFL guard. Exists so stability
/// experiments can march deliberately super-critical time steps and watch the
/// blow-up; everything else should call [`lw_interior_step`].
pub fn lw_interior_step_unchecked(
    state: &State,
    dt: f64,
    dx: f64,
    params: &FluidParams,
) -> Result<State> {
    let stencil = DerivativeStencil::compute(state, dx)?;
    let derivs = TimeDerivatives::compute(state, &stencil, params)?;
    let n = state.n_nodes();
    let half_dt2 = 0.5 * dt * dt;
    let mut rho = state.rho.clone();
    let mut v = state.v.clone();
    for j in 1..n - 1 {
        rho[j] = state.rho[j] + dt * derivs.dt_rho[j] + half_dt2 * derivs.dtt_rho[j];
        v[j] = state.v[j] + dt * derivs.dt_v[j] + half_dt2 * derivs.dtt_v[j];
    }
    Ok(State { t: state.t + dt, rho, v, phase: state.phase })
}

/// First-order reference kernel: textbook upwind (CIR) differencing along the
/// characteristic fields plus forward Euler on the friction source.
/// Deliberately order one in dt and dx; the order harness uses it to
/// demonstrate that the observed-order measurement discriminates.
///
/// The coefficient matrix has eigenvalues `v ± c` with right eigenvectors
/// `(rho, ±c)`, so `A± = lambda± r± l±` with the usual positive/negative part
/// split; each part differences one-sided into its own wind direction.
pub fn reference_interior_step(state: &State, dt: f64, dx: f64, params: &FluidParams) -> Result<State> {
    let c = params.sound_speed();
    let courant = c * dt / dx;
    if courant > 1.0 + CFL_SLACK {
        return Err(SolverError::CflViolation { courant, dt, dx });
    }
    let n = state.n_nodes();
    if n < 3 {
        return Err(SolverError::StencilTooShort { len: n });
    }
    let fric = params.friction_coefficient();
    let lambda = dt / dx;
    let mut rho = state.rho.clone();
    let mut v = state.v.clone();
    for j in 1..n - 1 {
        let r = state.rho[j];
        if !(r > 0.0) {
            return Err(SolverError::NonPositiveDensity { node: j, value: r });
        }
        let u = state.v[j];
        let lam_plus = u + c;
        let lam_minus = u - c;
        // Backward differences feed right-going parts, forward the left-going.
        let (dr_b, dv_b) = (r - state.rho[j - 1], u - state.v[j - 1]);
        let (dr_f, dv_f) = (state.rho[j + 1] - r, state.v[j + 1] - u);
        let (dr_p, dv_p) = if lam_plus >= 0.0 { (dr_b, dv_b) } else { (dr_f, dv_f) };
        let (dr_m, dv_m) = if lam_minus >= 0.0 { (dr_b, dv_b) } else { (dr_f, dv_f) };
        // Characteristic increments l±·du with l± = (1/(2 rho), ±1/(2c)).
        let w_p = lam_plus * (0.5 * dr_p / r + 0.5 * dv_p / c);
        let w_m = lam_minus * (0.5 * dr_m / r - 0.5 * dv_m / c);
        rho[j] = r - lambda * r * (w_p + w_m);
        v[j] = u - lambda * c * (w_p - w_m) - dt * fric * u * u.abs();
    }
    Ok(State { t: state.t + dt, rho, v, phase: state.phase })
}

/// Dispatch helper for the two kernels.
pub fn interior_step(
    kind: SchemeKind,
    state: &State,
    dt: f64,
    dx: f64,
    params: &FluidParams,
) -> Result<State> {
    match kind {
        SchemeKind::LaxWendroff => lw_interior_step(state, dt, dx, params),
        SchemeKind::FirstOrderReference => reference_interior_step(state, dt, dx, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Phase;

    fn params() -> FluidParams {
        FluidParams::new(2.5e8, 1000.0, 1.01e5, 2.0, 0.2).unwrap()
    }

    fn frictionless() -> FluidParams {
        FluidParams::new(2.5e8, 1000.0, 1.01e5, 0.0, 0.2).unwrap()
    }

    fn uniform(n: usize, rho: f64, v: f64) -> State {
        State::uniform(0.0, n, rho, v, Phase::PreClosure).unwrap()
    }

    #[test]
    fn central_diffs_of_constant_vanish() {
        let (d1, d2) = central_diffs(&[7.0; 9], 0.25).unwrap();
        for j in 1..8 {
            assert_eq!(d1[j], 0.0);
            assert_eq!(d2[j], 0.0);
        }
        assert!(d1[0].is_nan() && d1[8].is_nan());
        assert!(d2[0].is_nan() && d2[8].is_nan());
    }

    #[test]
    fn central_diffs_are_exact_on_affine_data() {
        let dx = 0.5;
        let values: Vec<f64> = (0..7).map(|j| j as f64 * dx).collect();
        let (d1, d2) = central_diffs(&values, dx).unwrap();
        for j in 1..6 {
            assert!((d1[j] - 1.0).abs() < 1e-14);
            assert!(d2[j].abs() < 1e-14);
        }
    }

    #[test]
    fn central_diffs_are_exact_on_quadratics() {
        // values = x^2 with dx = 0.5: at j = 2 (x = 1) the derivative is 2x = 2
        // and the second derivative is 2; central differences are exact here.
        let dx = 0.5;
        let values: Vec<f64> = (0..7).map(|j| (j as f64 * dx).powi(2)).collect();
        let (d1, d2) = central_diffs(&values, dx).unwrap();
        assert!((d1[2] - 2.0).abs() < 1e-13, "d1 = {}", d1[2]);
        assert!((d2[2] - 2.0).abs() < 1e-12, "d2 = {}", d2[2]);
    }

    #[test]
    fn central_diffs_reject_short_arrays() {
        assert!(matches!(
            central_diffs(&[1.0, 2.0], 0.1),
            Err(SolverError::StencilTooShort { len: 2 })
        ));
    }

    #[test]
    fn first_derivs_vanish_at_rest() {
        let state = uniform(5, 1000.0, 0.0);
        let stencil = DerivativeStencil::compute(&state, 0.1).unwrap();
        let (dt_rho, dt_v) = first_time_derivs(&state, &stencil, &params()).unwrap();
        for j in 1..4 {
            assert_eq!(dt_rho[j], 0.0);
            assert_eq!(dt_v[j], 0.0);
        }
    }

    #[test]
    fn first_derivs_reduce_to_friction_on_uniform_flow() {
        // C = 5: d_t v = -C v|v| = -5 for v = 1, +5 for v = -1.
        let stencil_at = |v0: f64| {
            let state = uniform(5, 1000.0, v0);
            let stencil = DerivativeStencil::compute(&state, 0.1).unwrap();
            first_time_derivs(&state, &stencil, &params()).unwrap()
        };
        let (dt_rho, dt_v) = stencil_at(1.0);
        assert_eq!(dt_rho[2], 0.0);
        assert_eq!(dt_v[2], -5.0);
        let (_, dt_v) = stencil_at(-1.0);
        assert_eq!(dt_v[2], 5.0);
    }

    #[test]
    fn second_derivs_vanish_at_rest() {
        let state = uniform(5, 1000.0, 0.0);
        let stencil = DerivativeStencil::compute(&state, 0.1).unwrap();
        let (dtt_rho, dtt_v) = second_time_derivs(&state, &stencil, &params()).unwrap();
        for j in 1..4 {
            assert_eq!(dtt_rho[j], 0.0);
            assert_eq!(dtt_v[j], 0.0);
        }
    }

    #[test]
    fn second_derivs_match_the_friction_ode() {
        // Uniform flow kills every gradient, so the system collapses to
        // v' = -C v^2 (v > 0) whose second derivative is 2 C^2 v^3.
        for v0 in [1.0, 0.5, 2.0] {
            let state = uniform(5, 1000.0, v0);
            let stencil = DerivativeStencil::compute(&state, 0.1).unwrap();
            let (dtt_rho, dtt_v) = second_time_derivs(&state, &stencil, &params()).unwrap();
            let expected = 2.0 * 25.0 * v0.powi(3);
            assert_eq!(dtt_rho[2], 0.0);
            assert!(
                (dtt_v[2] - expected).abs() <= 1e-12 * expected.abs(),
                "v0 = {v0}: dtt_v = {}, expected {expected}",
                dtt_v[2]
            );
        }
    }

    #[test]
    fn second_density_derivative_linearizes_to_acoustics() {
        // rho = rho_a + eps sin(kx), v = 0, c_f = 0:
        // d_t^2 rho = (K/rho_a) d_x^2 rho ~ -(K/rho_a) eps k^2 sin(kx).
        let params = frictionless();
        let dx = 0.01;
        let k = 1.3;
        let eps = 0.5;
        let n = 101;
        let rho: Vec<f64> = (0..n).map(|j| 1000.0 + eps * (k * j as f64 * dx).sin()).collect();
        let state = State::new(0.0, rho, vec![0.0; n], Phase::PreClosure).unwrap();
        let stencil = DerivativeStencil::compute(&state, dx).unwrap();
        let (dtt_rho, _) = second_time_derivs(&state, &stencil, &params).unwrap();
        let kappa = params.stiffness_ratio();
        for j in (10..n - 10).step_by(7) {
            let x = j as f64 * dx;
            let exact = -kappa * eps * k * k * (k * x).sin();
            // Central differences are O(dx^2) accurate on the sine.
            let tol = kappa * eps * k.powi(4) * dx * dx;
            assert!(
                (dtt_rho[j] - exact).abs() <= tol,
                "j = {j}: got {}, exact {exact}",
                dtt_rho[j]
            );
        }
    }

    #[test]
    fn friction_terms_are_continuous_across_rest() {
        // Gentle gradients so every |v|-scaled term sits below the tolerance.
        let dx = 0.1;
        let n = 21;
        let rho: Vec<f64> = (0..n).map(|j| 1000.0 + 1e-3 * (0.5 * j as f64 * dx).sin()).collect();
        let base_v: Vec<f64> = (0..n).map(|j| 1e-3 * (0.4 * j as f64 * dx).cos()).collect();
        let outputs: Vec<_> = [-1e-12, 0.0, 1e-12]
            .iter()
            .map(|&shift| {
                let v: Vec<f64> = base_v.iter().map(|&u| u * 1e-9 + shift).collect();
                let state = State::new(0.0, rho.clone(), v, Phase::PreClosure).unwrap();
                let stencil = DerivativeStencil::compute(&state, dx).unwrap();
                let (dt_rho, dt_v) = first_time_derivs(&state, &stencil, &params()).unwrap();
                let (dtt_rho, dtt_v) = second_time_derivs(&state, &stencil, &params()).unwrap();
                (dt_rho, dt_v, dtt_rho, dtt_v)
            })
            .collect();
        for j in 1..n - 1 {
            for pair in outputs.windows(2) {
                assert!((pair[0].0[j] - pair[1].0[j]).abs() < 1e-10);
                assert!((pair[0].1[j] - pair[1].1[j]).abs() < 1e-10);
                assert!((pair[0].2[j] - pair[1].2[j]).abs() < 1e-10);
                assert!((pair[0].3[j] - pair[1].3[j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lw_step_preserves_constant_frictionless_state() {
        let state = uniform(9, 1000.0, 1.0);
        let next = lw_interior_step(&state, 1e-4, 0.1, &frictionless()).unwrap();
        assert_eq!(next.rho, state.rho);
        assert_eq!(next.v, state.v);
        assert_eq!(next.t, 1e-4);
    }

    #[test]
    fn lw_step_matches_the_friction_taylor_value() {
        // Exact solution v(t) = v0 / (1 + C v0 t); its second-order Taylor step
        // from v0 = 1 with C = 5, dt = 1e-4 is 1 - C dt + C^2 dt^2 = 0.99950025.
        let state = uniform(9, 1000.0, 1.0);
        let next = lw_interior_step(&state, 1e-4, 0.1, &params()).unwrap();
        for j in 1..8 {
            assert!(
                (next.v[j] - 0.99950025).abs() < 1e-15,
                "v = {:.17}",
                next.v[j]
            );
            assert_eq!(next.rho[j], 1000.0);
        }
        // Boundary nodes are untouched by the interior step.
        assert_eq!(next.v[0], 1.0);
        assert_eq!(next.v[8], 1.0);
    }

    #[test]
    fn lw_step_refuses_supercritical_courant() {
        let state = uniform(9, 1000.0, 1.0);
        let err = lw_interior_step(&state, 3e-4, 0.1, &params());
        match err {
            Err(SolverError::CflViolation { courant, .. }) => {
                assert!((courant - 1.5).abs() < 1e-12)
            }
            other => panic!("expected CFL refusal, got {other:?}"),
        }
        assert!(lw_interior_step_unchecked(&state, 3e-4, 0.1, &params()).is_ok());
    }

    #[test]
    fn cfl_max_dt_examples() {
        assert!((cfl_max_dt(&params(), 0.1, 0.5).unwrap() - 1e-4).abs() < 1e-19);
        let unit = FluidParams::new(1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(cfl_max_dt(&unit, 1.0, 1.0).unwrap(), 1.0);
        assert!(cfl_max_dt(&params(), 0.1, 1.2).is_err());
        assert!(cfl_max_dt(&params(), 0.1, 0.0).is_err());
    }

    #[test]
    fn local_truncation_is_third_order_in_dt() {
        // One step on a smooth pulse against a reference marched with dt/10 on
        // a tenfold-refined mesh (a stand-in for the exact solution over one
        // step). Halving dt and dx together at fixed Courant number shrinks
        // the one-step defect by about 2^3.
        let params = frictionless();
        let initial = |dx: f64| {
            let n = (40.0 / dx).round() as usize + 1;
            let rho: Vec<f64> = (0..n)
                .map(|j| {
                    let x = j as f64 * dx;
                    1000.0 + 2.0 * (-((x - 20.0) / 4.0) * ((x - 20.0) / 4.0)).exp()
                })
                .collect();
            State::new(0.0, rho, vec![0.0; n], Phase::PreClosure).unwrap()
        };
        let march = |dx: f64, dt: f64, steps: usize| {
            let mut s = initial(dx);
            for _ in 0..steps {
                s = lw_interior_step(&s, dt, dx, &params).unwrap();
            }
            s
        };
        // Measured on v: the pulse starts at rest, so rho is even in time and
        // its dt^3 term vanishes for the first step.
        let defect = |dx: f64, dt: f64| {
            let one = march(dx, dt, 1);
            let reference = march(dx / 10.0, dt / 10.0, 10);
            let n = one.v.len();
            let margin = n / 10;
            (margin..n - margin)
                .map(|j| (one.v[j] - reference.v[10 * j]).abs())
                .fold(0.0f64, f64::max)
        };
        // Courant 0.5 on both levels.
        let ratio = defect(0.2, 2e-4) / defect(0.1, 1e-4);
        assert!(
            (6.0..=10.0).contains(&ratio),
            "one-step defect ratio {ratio} is not ~8"
        );
    }

    #[test]
    fn reference_kernel_is_forward_euler_on_uniform_flow() {
        let state = uniform(9, 1000.0, 1.0);
        let next = reference_interior_step(&state, 1e-4, 0.1, &params()).unwrap();
        for j in 1..8 {
            assert!((next.v[j] - (1.0 - 5e-4)).abs() < 1e-15);
            assert_eq!(next.rho[j], 1000.0);
        }
    }
}

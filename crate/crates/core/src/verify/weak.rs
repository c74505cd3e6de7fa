//! Discrete weak-form residual of the post-closure numerical solution.
//!
//! The conserved pair `w = (rho, q)` with flux `F(w) = (q, q^2/rho + p(rho))`
//! and source `G(w) = (0, -c_f q|q|/(2 D rho))` solves
//! `d_t w + d_x F(w) = G(w)`, so for test functions supported strictly inside
//! `(t_close, T) x (0, L)` integration by parts leaves the identity
//!
//! ```text
//! I(w) = 0,
//! I(W) = ∫∫ W·d_t phi + F(W)·d_x phi + G(W)·phi dx dt
//!      + k1 ∫ W(t_close, x)·phi(t_close, x) dx - ∫ F(W(t, L))·phi(t, L) dt
//! ```
//!
//! (`k1 = 2` by default; the line terms vanish for interior test functions).
//! The source term must enter with a plus: both of its signs flip under the
//! integration by parts, and with a minus the residual of the converged
//! solution tends to the nonzero constant `-2 ∫∫ G·phi` instead of zero.
//! Evaluating `I` on the piecewise-constant extension of the numerical
//! solution measures how far the scheme is from the weak solution; under
//! joint `(dx, dt)` refinement the residual is expected to shrink at first
//! order.
//!
//! Discrete assembly: the solution value at node `(n dt, j dx)` is spread over
//! the cell `[(n-1) dt, n dt] x [(j-1) dx, j dx]`; the test function enters
//! through cross-averages over the five-cell plus stencil around each cell
//! (midpoint rule per cell), with its time derivative taken as the backward
//! difference and its space derivative as the central difference of those
//! averages, matching the summation-by-parts pairing behind the identity.

use crate::driver::{Snapshot, Trajectory};
use crate::error::{Result, SolverError};
use crate::params::FluidParams;
use crate::state::Phase;

/// Scalar test function applied to both components of the pair.
pub trait TestFunction {
    fn eval(&self, t: f64, x: f64) -> f64;
    /// Closed support box `(t_lo, t_hi, x_lo, x_hi)`.
    fn support(&self) -> (f64, f64, f64, f64);
}

/// Tensor-product C^2 bump `(1 - s_t^2)^3 (1 - s_x^2)^3` on a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpTestFunction {
    pub t_center: f64,
    pub t_halfwidth: f64,
    pub x_center: f64,
    pub x_halfwidth: f64,
}

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let w = 1.0 - s * s;
        w * w * w
    }
}

impl TestFunction for BumpTestFunction {
    fn eval(&self, t: f64, x: f64) -> f64 {
        bump((t - self.t_center) / self.t_halfwidth) * bump((x - self.x_center) / self.x_halfwidth)
    }

    fn support(&self) -> (f64, f64, f64, f64) {
        (
            self.t_center - self.t_halfwidth,
            self.t_center + self.t_halfwidth,
            self.x_center - self.x_halfwidth,
            self.x_center + self.x_halfwidth,
        )
    }
}

impl BumpTestFunction {
    /// The fixed reproducible family: three centers along the time span at the
    /// pipe midpoint, each at two scales.
    pub fn default_family(t_lo: f64, t_hi: f64, x_lo: f64, x_hi: f64) -> Vec<BumpTestFunction> {
        let t_span = t_hi - t_lo;
        let x_span = x_hi - x_lo;
        let mut family = Vec::new();
        for &ct in &[0.3, 0.5, 0.7] {
            for &scale in &[1.0, 0.5] {
                family.push(BumpTestFunction {
                    t_center: t_lo + ct * t_span,
                    t_halfwidth: scale * 0.22 * t_span,
                    x_center: x_lo + 0.5 * x_span,
                    x_halfwidth: scale * 0.35 * x_span,
                });
            }
        }
        family
    }
}

/// Assembly knobs. The closure-line coefficient is configurable so its
/// sensitivity can be probed; the identity carries it as 2.
#[derive(Debug, Clone, Copy)]
pub struct WeakConfig {
    pub t1_line_coefficient: f64,
}

impl Default for WeakConfig {
    fn default() -> Self {
        WeakConfig { t1_line_coefficient: 2.0 }
    }
}

/// Bounds monitored per run: the convergence statement assumes the numerical
/// solution stays uniformly bounded and the flux has bounded variation at the
/// closure instant.
#[derive(Debug, Clone, Copy)]
pub struct HypothesisMonitor {
    pub max_abs_rho: f64,
    pub max_abs_v: f64,
    pub max_abs_q: f64,
    /// Discrete total variation of `F(w)` over `[0, 2L]` at the last
    /// pre-closure level, if one was recorded.
    pub flux_variation_at_closure: Option<f64>,
}

pub fn hypothesis_monitor(trajectory: &Trajectory, params: &FluidParams) -> HypothesisMonitor {
    let mut max_abs_rho = 0.0f64;
    let mut max_abs_v = 0.0f64;
    let mut max_abs_q = 0.0f64;
    for snapshot in &trajectory.snapshots {
        for (&r, &u) in snapshot.rho.iter().zip(&snapshot.v) {
            max_abs_rho = max_abs_rho.max(r.abs());
            max_abs_v = max_abs_v.max(u.abs());
            max_abs_q = max_abs_q.max((r * u).abs());
        }
    }
    let flux_variation_at_closure = trajectory
        .snapshots
        .iter()
        .rev()
        .find(|s| s.phase == Phase::PreClosure)
        .map(|s| {
            let f = |j: usize| flux(s.rho[j], s.rho[j] * s.v[j], params);
            (0..s.rho.len() - 1)
                .map(|j| {
                    let (f1a, f2a) = f(j);
                    let (f1b, f2b) = f(j + 1);
                    (f1b - f1a).abs() + (f2b - f2a).abs()
                })
                .sum()
        });
    HypothesisMonitor { max_abs_rho, max_abs_v, max_abs_q, flux_variation_at_closure }
}

fn flux(rho: f64, q: f64, params: &FluidParams) -> (f64, f64) {
    let p = params.p_a + params.bulk_stiffness * (rho - params.rho_a) / params.rho_a;
    (q, q * q / rho + p)
}

fn source_momentum(rho: f64, q: f64, params: &FluidParams) -> f64 {
    -params.c_f * q * q.abs() / (2.0 * params.diameter * rho)
}

/// Post-closure snapshots at unit stride, with a trailing partial step dropped.
fn post_closure_levels<'a>(trajectory: &'a Trajectory) -> Result<(Vec<&'a Snapshot>, f64)> {
    let mut levels: Vec<&Snapshot> =
        trajectory.snapshots.iter().filter(|s| s.phase == Phase::PostClosure).collect();
    if levels.len() < 4 {
        return Err(SolverError::InsufficientData(format!(
            "{} post-closure snapshots; the weak residual needs every level (snapshot stride 1)",
            levels.len()
        )));
    }
    let dt = levels[1].t - levels[0].t;
    if (dt - trajectory.dt).abs() > 1e-9 * trajectory.dt {
        return Err(SolverError::InsufficientData(format!(
            "post-closure snapshot spacing {dt} differs from dt = {}; record with snapshot stride 1",
            trajectory.dt
        )));
    }
    // A final partial step produces one unevenly spaced trailing level.
    let last_spacing = levels[levels.len() - 1].t - levels[levels.len() - 2].t;
    if (last_spacing - dt).abs() > 1e-9 * dt {
        levels.pop();
    }
    for pair in levels.windows(2) {
        let spacing = pair[1].t - pair[0].t;
        if (spacing - dt).abs() > 1e-9 * dt {
            return Err(SolverError::GridAlignment(format!(
                "post-closure snapshots unevenly spaced ({spacing} vs {dt})"
            )));
        }
    }
    Ok((levels, dt))
}

/// Assembles the discrete weak residual `I` for one test function. The sign is
/// kept; callers usually report `|I|`.
pub fn weak_residual(
    trajectory: &Trajectory,
    params: &FluidParams,
    test_function: &dyn TestFunction,
    config: &WeakConfig,
) -> Result<f64> {
    let (levels, dt) = post_closure_levels(trajectory)?;
    let dx = trajectory.dx;
    let n_x = levels[0].rho.len() - 1;
    let n_t = levels.len() - 1;
    let t1 = levels[0].t;
    let t_hi_domain = levels[n_t].t;
    let length = n_x as f64 * dx;

    let (s_tlo, s_thi, s_xlo, s_xhi) = test_function.support();
    if !(s_tlo > t1 && s_thi < t_hi_domain && s_xlo > 0.0 && s_xhi < length) {
        return Err(SolverError::SupportOutsideDomain(format!(
            "support [{s_tlo}, {s_thi}] x [{s_xlo}, {s_xhi}] vs domain ({t1}, {t_hi_domain}) x (0, {length})"
        )));
    }

    // Cell-center values of the test function: cell (n, j) covers
    // [t1 + (n-1) dt, t1 + n dt] x [(j-1) dx, j dx]. Indices are offset by one
    // so n, j = 0 address the ghost cells below the domain.
    let rows = n_t + 2;
    let cols = n_x + 3;
    let mut centers = vec![0.0f64; rows * cols];
    for n in 0..rows {
        let t = t1 + (n as f64 - 0.5) * dt;
        for j in 0..cols {
            let x = (j as f64 - 0.5) * dx;
            centers[n * cols + j] = test_function.eval(t, x);
        }
    }
    let center = |n: isize, j: isize| -> f64 {
        if n < 0 || j < 0 || n as usize >= rows || j as usize >= cols {
            0.0
        } else {
            centers[n as usize * cols + j as usize]
        }
    };
    // Cross-average over the five-cell plus stencil (midpoint rule per cell).
    let cross = |n: isize, j: isize| -> f64 {
        (center(n, j - 1) + center(n - 1, j) + center(n, j) + center(n + 1, j) + center(n, j + 1))
            / 5.0
    };

    let mut interior = 0.0f64;
    let mut flux_line = 0.0f64;
    for n in 1..=n_t {
        let snapshot = levels[n];
        let prev_row_needed = n as isize - 1;
        for j in 1..=n_x {
            let phi = cross(n as isize, j as isize);
            let phi_tm = cross(prev_row_needed, j as isize);
            let phi_xm = cross(n as isize, j as isize - 1);
            let phi_xp = cross(n as isize, j as isize + 1);
            let dt_phi = (phi - phi_tm) / dt;
            let dx_phi = (phi_xp - phi_xm) / (2.0 * dx);

            let rho = snapshot.rho[j];
            let q = rho * snapshot.v[j];
            let (f1, f2) = flux(rho, q, params);
            let g2 = source_momentum(rho, q, params);

            interior += (rho + q) * dt_phi + (f1 + f2) * dx_phi + g2 * phi;
        }
        let rho_l = snapshot.rho[n_x];
        let q_l = rho_l * snapshot.v[n_x];
        let (f1, f2) = flux(rho_l, q_l, params);
        flux_line += (f1 + f2) * cross(n as isize, n_x as isize);
    }
    interior *= dx * dt;
    flux_line *= dt;

    let mut t1_line = 0.0f64;
    let first = levels[1];
    for j in 1..=n_x {
        let rho = first.rho[j];
        let q = rho * first.v[j];
        t1_line += (rho + q) * cross(1, j as isize);
    }
    t1_line *= config.t1_line_coefficient * dx;

    Ok(interior + t1_line - flux_line)
}

/// Residual magnitudes for a family of test functions.
pub fn weak_residuals(
    trajectory: &Trajectory,
    params: &FluidParams,
    test_functions: &[BumpTestFunction],
    config: &WeakConfig,
) -> Result<Vec<f64>> {
    test_functions
        .iter()
        .map(|tf| weak_residual(trajectory, params, tf, config).map(f64::abs))
        .collect()
}

/// Residuals across a mesh-refinement family, with coarse/fine ratios.
#[derive(Debug, Clone)]
pub struct WeakResidualReport {
    pub bumps: Vec<BumpTestFunction>,
    /// `(dx, dt)` per level, coarse to fine.
    pub mesh_levels: Vec<(f64, f64)>,
    /// `residuals[level][bump]`.
    pub residuals: Vec<Vec<f64>>,
    /// `ratios[bump][i] = residuals[i][bump] / residuals[i+1][bump]`.
    pub ratios: Vec<Vec<f64>>,
    pub monitors: Vec<HypothesisMonitor>,
}

/// Runs the scenario on each mesh level (same Courant number, every time level
/// recorded) and assembles the residual refinement table for the default bump
/// family.
pub fn weak_refinement_study(
    base: &Scenario,
    dxs: &[f64],
    config: &WeakConfig,
) -> Result<WeakResidualReport> {
    use crate::driver::{run, Recording};

    if dxs.len() < 2 {
        return Err(SolverError::InsufficientData("need at least two mesh levels".into()));
    }
    let mut bumps: Option<Vec<BumpTestFunction>> = None;
    let mut mesh_levels = Vec::new();
    let mut residuals = Vec::new();
    let mut monitors = Vec::new();
    for &dx in dxs {
        let scenario = Scenario { dx, ..base.clone() };
        let trajectory = run(&scenario, &Recording::full(vec![]))?;
        let t1 = trajectory.t_close_snapped.ok_or_else(|| {
            SolverError::InsufficientData("weak study scenario never closes the valve".into())
        })?;
        let family = bumps
            .get_or_insert_with(|| {
                BumpTestFunction::default_family(t1, scenario.t_end, 0.0, scenario.length_half)
            })
            .clone();
        monitors.push(hypothesis_monitor(&trajectory, &scenario.params));
        mesh_levels.push((trajectory.dx, trajectory.dt));
        residuals.push(weak_residuals(&trajectory, &scenario.params, &family, config)?);
    }
    let bumps = bumps.unwrap_or_default();
    let mut ratios = vec![Vec::new(); bumps.len()];
    for level in 0..residuals.len() - 1 {
        for (b, ratio_list) in ratios.iter_mut().enumerate() {
            ratio_list.push(residuals[level][b] / residuals[level + 1][b]);
        }
    }
    Ok(WeakResidualReport { bumps, mesh_levels, residuals, ratios, monitors })
}

use crate::scenario::Scenario;

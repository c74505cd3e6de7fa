//! Observed-order-of-accuracy studies.
//!
//! Two study families: the spatially uniform friction decay, whose exact
//! solution `v(t) = v0 / (1 + C v0 t)` gives a temporal-order oracle, and a
//! smooth frictionless acoustic pulse refined jointly in (dx, dt) at fixed
//! Courant number, measured by Richardson comparison against the next-finer
//! level. Both accept the first-order reference kernel so the harness can
//! show it distinguishes order one from order two.

use crate::driver::{run_with, Recording, RunOptions, Snapshot};
use crate::error::{Result, SolverError};
use crate::params::FluidParams;
use crate::scenario::{Profile, Scenario};
use crate::scheme::SchemeKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshLevel {
    pub dx: f64,
    pub dt: f64,
}

/// Levels, error norms, and pairwise observed orders `log2(err_i / err_{i+1})`.
#[derive(Debug, Clone)]
pub struct OrderReport {
    pub mesh_levels: Vec<MeshLevel>,
    /// One entry per level for exact oracles; one per adjacent pair for
    /// Richardson comparisons.
    pub errors: Vec<f64>,
    pub observed_orders: Vec<f64>,
}

/// A scenario family plus the oracle to measure against.
#[derive(Debug, Clone)]
pub enum OrderStudy {
    /// Uniform (rho, v) decaying under friction; error against the exact ODE
    /// solution at `t_end` in the discrete max norm.
    FrictionDecay { dts: Vec<f64>, scheme: SchemeKind },
    /// Frictionless Gaussian density pulse on the open pipe with live
    /// reservoir boundaries; each level halves dx at fixed Courant number and
    /// is measured against the next-finer level on common nodes.
    AcousticPulseRichardson { dxs: Vec<f64>, courant: f64, scheme: SchemeKind },
}

fn final_snapshot(scenario: &Scenario, scheme: SchemeKind) -> Result<Snapshot> {
    let recording = Recording { probes: vec![], snapshot_stride: usize::MAX };
    let options = RunOptions { scheme, courant_override: None };
    let trajectory = run_with(scenario, &recording, &options)?;
    trajectory
        .snapshots
        .into_iter()
        .last()
        .ok_or_else(|| SolverError::InsufficientData("run produced no snapshots".into()))
}

fn pairwise_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Runs the study and reports per-level errors and observed orders.
pub fn observed_order(study: &OrderStudy) -> Result<OrderReport> {
    match study {
        OrderStudy::FrictionDecay { dts, scheme } => friction_decay(dts, *scheme),
        OrderStudy::AcousticPulseRichardson { dxs, courant, scheme } => {
            acoustic_pulse_richardson(dxs, *courant, *scheme)
        }
    }
}

/// Friction-decay setup: C = 5 (c_f = 2, D = 0.2), v0 = 1, T = 0.2, on a short
/// uniform pipe with dx = 0.2, so dt = 4e-4 corresponds to Courant 1.
fn friction_decay_scenario(dt: f64) -> Result<(Scenario, f64)> {
    let params = FluidParams::new(2.5e8, 1000.0, 1.01e5, 2.0, 0.2)?;
    let dx = 0.2;
    let courant = (params.sound_speed() * dt / dx).min(1.0);
    if !(courant > 0.0) {
        return Err(SolverError::InvalidParameter {
            name: "dt",
            value: dt,
            constraint: "dt > 0",
        });
    }
    let scenario = Scenario {
        params,
        length_half: 2.0,
        dx,
        courant,
        t_close: 1.0, // never closes within the horizon
        t_end: 0.2,
        rho_init: Profile::Constant(1000.0),
        v_init: Profile::Constant(1.0),
        rho_left: 1000.0,
        rho_right: 1000.0,
    };
    let dt_actual = courant * dx / scenario.params.sound_speed();
    Ok((scenario, dt_actual))
}

fn friction_decay(dts: &[f64], scheme: SchemeKind) -> Result<OrderReport> {
    if dts.len() < 2 {
        return Err(SolverError::InsufficientData(format!(
            "need at least 2 time-step levels, got {}",
            dts.len()
        )));
    }
    let mut mesh_levels = Vec::new();
    let mut errors = Vec::new();
    for &dt in dts {
        let (scenario, dt_actual) = friction_decay_scenario(dt)?;
        let snapshot = final_snapshot(&scenario, scheme)?;
        let friction = scenario.params.friction_coefficient();
        let v_exact = 1.0 / (1.0 + friction * snapshot.t);
        let err_v = snapshot.v.iter().map(|&u| (u - v_exact).abs()).fold(0.0f64, f64::max);
        let err_rho =
            snapshot.rho.iter().map(|&r| (r - 1000.0).abs()).fold(0.0f64, f64::max);
        mesh_levels.push(MeshLevel { dx: scenario.dx, dt: dt_actual });
        errors.push(err_v.max(err_rho));
    }
    let observed_orders = pairwise_orders(&errors);
    Ok(OrderReport { mesh_levels, errors, observed_orders })
}

/// Pulse setup shared by every level: domain [0, 40], Gaussian density bump of
/// amplitude 2 at the valve position, no friction. The split waves hit the
/// reservoirs at t = 0.04 and are traveling back inward by the 0.06 horizon,
/// so the reservoir closures shape the measured solution.
fn pulse_scenario(dx: f64, courant: f64) -> Result<Scenario> {
    Ok(Scenario {
        params: FluidParams::new(2.5e8, 1000.0, 1.01e5, 0.0, 0.2)?,
        length_half: 20.0,
        dx,
        courant,
        t_close: 1.0,
        t_end: 0.06,
        rho_init: Profile::Gaussian { base: 1000.0, amplitude: 2.0, center: 20.0, width: 4.0 },
        v_init: Profile::Constant(0.0),
        rho_left: 1000.0,
        rho_right: 1000.0,
    })
}

fn acoustic_pulse_richardson(dxs: &[f64], courant: f64, scheme: SchemeKind) -> Result<OrderReport> {
    if dxs.len() < 3 {
        return Err(SolverError::InsufficientData(format!(
            "Richardson comparison needs at least 3 mesh levels, got {}",
            dxs.len()
        )));
    }
    for pair in dxs.windows(2) {
        let ratio = pair[0] / pair[1];
        if !(ratio > 1.0) || (ratio - ratio.round()).abs() > 1e-9 {
            return Err(SolverError::GridAlignment(format!(
                "dx levels {} and {} do not nest (ratio {ratio})",
                pair[0], pair[1]
            )));
        }
    }

    let mut mesh_levels = Vec::new();
    let mut finals = Vec::new();
    for &dx in dxs {
        let scenario = pulse_scenario(dx, courant)?;
        let grid = scenario.validate()?;
        let snapshot = final_snapshot(&scenario, scheme)?;
        mesh_levels.push(MeshLevel { dx: grid.dx, dt: courant * grid.dx / scenario.params.sound_speed() });
        finals.push(snapshot);
    }

    // Error of each level against the next-finer one on the coarse nodes.
    let mut errors = Vec::new();
    for i in 0..finals.len() - 1 {
        let ratio = (dxs[i] / dxs[i + 1]).round() as usize;
        let coarse = &finals[i];
        let fine = &finals[i + 1];
        let mut err = 0.0f64;
        for j in 0..coarse.rho.len() {
            let jf = j * ratio;
            err = err.max((coarse.rho[j] - fine.rho[jf]).abs());
            err = err.max((coarse.v[j] - fine.v[jf]).abs());
        }
        errors.push(err);
    }
    let observed_orders = pairwise_orders(&errors);
    Ok(OrderReport { mesh_levels, errors, observed_orders })
}

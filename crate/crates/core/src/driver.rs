//! Time marching over both boundary phases, valve-event handling, probe and
//! snapshot recording.

use crate::boundary::{apply_post_closure, apply_pre_closure, close_valve, BoundarySpec};
use crate::error::{Result, SolverError};
use crate::params::FluidParams;
use crate::scenario::Scenario;
use crate::scheme::{cfl_max_dt, interior_step, lw_interior_step_unchecked, SchemeKind};
use crate::state::{Phase, State};

/// What to record while marching.
#[derive(Debug, Clone, Default)]
pub struct Recording {
    /// Probe x coordinates; each is snapped to the nearest node.
    pub probes: Vec<f64>,
    /// Record a full snapshot every `snapshot_stride` steps (0 disables
    /// snapshots). The initial, closure and final states are always included
    /// when snapshots are enabled.
    pub snapshot_stride: usize,
}

impl Recording {
    pub fn probes_only(probes: Vec<f64>) -> Self {
        Recording { probes, snapshot_stride: 0 }
    }

    pub fn full(probes: Vec<f64>) -> Self {
        Recording { probes, snapshot_stride: 1 }
    }
}

/// Marching options beyond the scenario itself.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub scheme: SchemeKind,
    /// Overrides the scenario's Courant number, accepting values above 1.
    /// That disables the kernel's CFL guard (the per-step state monitor stays
    /// active), which is exactly what the stability experiments need.
    pub courant_override: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { scheme: SchemeKind::LaxWendroff, courant_override: None }
    }
}

/// Full state recorded at one time level.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub phase: Phase,
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    /// Pressure column, redundant with `rho` through the pressure law.
    pub p: Vec<f64>,
}

/// Time series of (t, rho, v, p) at a fixed node.
#[derive(Debug, Clone)]
pub struct ProbeSeries {
    pub x_requested: f64,
    pub x_snapped: f64,
    pub node: usize,
    pub t: Vec<f64>,
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    ValveClosed {
        /// Signed distance from the requested `t_close` to the snapped one.
        snap_distance: f64,
        /// Central-difference `d_x rho` at the valve just before closure; the
        /// switched problem assumes this limit vanishes.
        grad_rho_mismatch: f64,
    },
    ProbeSnapped { requested: f64, snapped: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub probes: Vec<ProbeSeries>,
    pub events: Vec<Event>,
    pub dx: f64,
    pub dt: f64,
    pub n_steps: u64,
    /// Closure time snapped to the step grid, if the valve closed.
    pub t_close_snapped: Option<f64>,
}

impl Trajectory {
    pub fn snapshot_times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn probe_at(&self, x: f64) -> Option<&ProbeSeries> {
        self.probes
            .iter()
            .min_by(|a, b| (a.x_snapped - x).abs().total_cmp(&(b.x_snapped - x).abs()))
            .filter(|p| (p.x_snapped - x).abs() <= 0.5 * self.dx + 1e-12)
    }
}

/// Classical Joukowsky surge `rho_a c delta_v` [Pa]; used as an approximate
/// oracle for the post-closure pressure spike.
pub fn joukowsky_surge(params: &FluidParams, delta_v: f64) -> f64 {
    params.rho_a * params.sound_speed() * delta_v
}

/// Dominant oscillation period from peak-to-peak spacing.
///
/// Peaks are the maxima of the contiguous runs above the mid level
/// `(max + min)/2`, which makes the estimate robust against the scheme's
/// ringing around each plateau.
pub fn oscillation_period_estimate(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() || times.len() < 8 {
        return Err(SolverError::InsufficientData(format!(
            "probe series of length {} is too short for a period estimate",
            times.len()
        )));
    }
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let span = vmax - vmin;
    if !(span > 1e-12 * vmax.abs().max(vmin.abs()).max(1.0)) {
        return Err(SolverError::InsufficientData("signal does not oscillate".into()));
    }
    let threshold = vmin + 0.5 * span;

    let mut peak_times = Vec::new();
    let mut in_segment = false;
    let mut best: (f64, f64) = (0.0, f64::NEG_INFINITY);
    for (&t, &y) in times.iter().zip(values) {
        if y >= threshold {
            if !in_segment {
                in_segment = true;
                best = (t, y);
            } else if y > best.1 {
                best = (t, y);
            }
        } else if in_segment {
            in_segment = false;
            peak_times.push(best.0);
        }
    }
    if in_segment {
        peak_times.push(best.0);
    }
    if peak_times.len() < 2 {
        return Err(SolverError::InsufficientData(format!(
            "found {} dominant peak(s); need at least two periods",
            peak_times.len()
        )));
    }
    let spacings: Vec<f64> = peak_times.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(spacings.iter().sum::<f64>() / spacings.len() as f64)
}

struct Recorder<'a> {
    params: &'a FluidParams,
    stride: usize,
    snapshots: Vec<Snapshot>,
    probes: Vec<ProbeSeries>,
    valve_index: usize,
}

impl<'a> Recorder<'a> {
    fn pressure_row(&self, rho: &[f64]) -> Vec<f64> {
        rho.iter()
            .map(|&r| self.params.pressure_of_density(r).expect("monitored state has rho > 0"))
            .collect()
    }

    fn record_probes(&mut self, state: &State) {
        for probe in &mut self.probes {
            if state.phase == Phase::PostClosure && probe.node > self.valve_index {
                continue;
            }
            let r = state.rho[probe.node];
            probe.t.push(state.t);
            probe.rho.push(r);
            probe.v.push(state.v[probe.node]);
            probe
                .p
                .push(self.params.pressure_of_density(r).expect("monitored state has rho > 0"));
        }
    }

    fn record_snapshot(&mut self, state: &State) {
        if self.stride == 0 {
            return;
        }
        let snapshot = Snapshot {
            t: state.t,
            phase: state.phase,
            rho: state.rho.clone(),
            v: state.v.clone(),
            p: self.pressure_row(&state.rho),
        };
        // Keep snapshot times strictly increasing: the post-closure state at
        // t_close supersedes the pre-closure one recorded the same instant.
        match self.snapshots.last_mut() {
            Some(last) if last.t == snapshot.t => *last = snapshot,
            _ => self.snapshots.push(snapshot),
        }
    }

    fn record_step(&mut self, state: &State, step: u64, is_last: bool) {
        self.record_probes(state);
        if self.stride > 0 && (step as usize % self.stride == 0 || is_last) {
            self.record_snapshot(state);
        }
    }
}

/// Marches the scenario with the default Lax-Wendroff kernel.
pub fn run(scenario: &Scenario, recording: &Recording) -> Result<Trajectory> {
    run_with(scenario, recording, &RunOptions::default())
}

/// Marches the scenario: pre-closure from 0 to the snapped `t_close`, the
/// valve event, then post-closure to `t_end` (final partial step with the
/// remainder). Deterministic for a given scenario. Aborts with the step index
/// and node on a monitor violation.
pub fn run_with(scenario: &Scenario, recording: &Recording, options: &RunOptions) -> Result<Trajectory> {
    let grid = scenario.validate()?;
    let params = &scenario.params;
    let dx = grid.dx;

    let (dt, unchecked) = match options.courant_override {
        None => (cfl_max_dt(params, dx, scenario.courant)?, false),
        Some(co) => {
            if !(co > 0.0) || !co.is_finite() {
                return Err(SolverError::InvalidParameter {
                    name: "courant_override",
                    value: co,
                    constraint: "courant > 0",
                });
            }
            (co * dx / params.sound_speed(), co > 1.0)
        }
    };

    let mut events = Vec::new();
    let mut probes = Vec::new();
    for &x in &recording.probes {
        let node = grid.nearest_node(x);
        let snapped = grid.x(node);
        if (snapped - x).abs() > 1e-9 * dx.max(x.abs()) {
            events.push(Event { t: 0.0, kind: EventKind::ProbeSnapped { requested: x, snapped } });
        }
        probes.push(ProbeSeries {
            x_requested: x,
            x_snapped: snapped,
            node,
            t: Vec::new(),
            rho: Vec::new(),
            v: Vec::new(),
            p: Vec::new(),
        });
    }

    let mut recorder = Recorder {
        params,
        stride: recording.snapshot_stride,
        snapshots: Vec::new(),
        probes,
        valve_index: grid.valve_index,
    };

    // Snapped closure step count, or None when the valve never closes in the horizon.
    let close_step: Option<u64> = if scenario.t_close < scenario.t_end {
        let k = (scenario.t_close / dt).round().max(1.0);
        if k * dt < scenario.t_end { Some(k as u64) } else { None }
    } else {
        None
    };
    let t_close_snapped = close_step.map(|k| k as f64 * dt);

    let mut state = scenario.initial_state(&grid)?;
    recorder.record_probes(&state);
    recorder.record_snapshot(&state);

    let pre_spec =
        BoundarySpec { phase: Phase::PreClosure, rho_left: scenario.rho_left, rho_right: scenario.rho_right };
    let post_spec = BoundarySpec { phase: Phase::PostClosure, ..pre_spec };

    let mut step: u64 = 0;
    let mut advance = |state: &mut State, h: f64, recorder: &mut Recorder, is_last: bool| -> Result<()> {
        step += 1;
        let t_next = state.t + h;
        let mut next = if unchecked {
            lw_interior_step_unchecked(state, h, dx, params)
        } else {
            interior_step(options.scheme, state, h, dx, params)
        }
        .map_err(|e| at_step(e, step, t_next))?;
        match next.phase {
            Phase::PreClosure => apply_pre_closure(&mut next, &pre_spec, params)?,
            Phase::PostClosure => apply_post_closure(&mut next, &post_spec, params)?,
        }
        if let Some((node, kind)) = next.monitor(params) {
            return Err(SolverError::MonitorViolation { step, t: next.t, node, kind });
        }
        *state = next;
        recorder.record_step(state, step, is_last);
        Ok(())
    };

    // Steps in the pre-closure phase (up to closure or the whole horizon).
    let (pre_full, pre_remainder) = match close_step {
        Some(k) => (k, 0.0),
        None => split_steps(scenario.t_end, dt),
    };
    for i in 1..=pre_full {
        let is_last = close_step.is_none() && pre_remainder == 0.0 && i == pre_full;
        advance(&mut state, dt, &mut recorder, is_last)?;
    }

    if let Some(k) = close_step {
        let t1 = k as f64 * dt;
        let (closed, grad_rho_mismatch) = close_valve(state, t1, dt, dx)?;
        state = closed;
        events.push(Event {
            t: t1,
            kind: EventKind::ValveClosed { snap_distance: t1 - scenario.t_close, grad_rho_mismatch },
        });
        recorder.record_snapshot(&state);

        let (post_full, post_remainder) = split_steps(scenario.t_end - t1, dt);
        for i in 1..=post_full {
            let is_last = post_remainder == 0.0 && i == post_full;
            advance(&mut state, dt, &mut recorder, is_last)?;
        }
        if post_remainder > 0.0 {
            advance(&mut state, post_remainder, &mut recorder, true)?;
        }
    } else if pre_remainder > 0.0 {
        advance(&mut state, pre_remainder, &mut recorder, true)?;
    }

    Ok(Trajectory {
        snapshots: recorder.snapshots,
        probes: recorder.probes,
        events,
        dx,
        dt,
        n_steps: step,
        t_close_snapped,
    })
}

/// Splits a span into full steps of `dt` plus a strictly positive remainder
/// (0.0 when the span is an integer multiple of `dt` up to roundoff).
fn split_steps(span: f64, dt: f64) -> (u64, f64) {
    let n_exact = span / dt;
    let rounded = n_exact.round();
    if rounded >= 1.0 && (n_exact - rounded).abs() <= 1e-9 * n_exact.max(1.0) {
        (rounded as u64, 0.0)
    } else {
        let full = n_exact.floor();
        (full as u64, span - full * dt)
    }
}

fn at_step(e: SolverError, step: u64, t: f64) -> SolverError {
    // Kernel-level density singularities become monitor aborts with context.
    match e {
        SolverError::NonPositiveDensity { node, value } => SolverError::MonitorViolation {
            step,
            t,
            node,
            kind: crate::error::MonitorKind::NonPositiveDensity { rho: value },
        },
        other => other,
    }
}

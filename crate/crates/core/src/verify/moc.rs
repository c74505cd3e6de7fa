//! Method-of-characteristics oracle for the damped scalar transport problem
//!
//! ```text
//! d_t u + c d_x u = -b |u|^2,    u(0, x) = f(x) H_eps(x),    u(t, 0) = 0
//! ```
//!
//! with constant wave speed. The reflected two-term solution gives an
//! independent closed form the Lax-Wendroff harness can be checked against.

use crate::error::{Result, SolverError};
use crate::verify::heaviside::smoothed_heaviside;

/// Closed-form oracle data: profile `f`, Heaviside smoothing width, constant
/// wave speed `c > 0`, damping `b >= 0`.
pub struct MocOracle {
    profile: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub epsilon: f64,
    pub wave_speed: f64,
    pub damping: f64,
}

impl MocOracle {
    pub fn new(
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        epsilon: f64,
        wave_speed: f64,
        damping: f64,
    ) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(SolverError::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                constraint: "epsilon > 0",
            });
        }
        if !(wave_speed > 0.0) || !wave_speed.is_finite() {
            return Err(SolverError::InvalidParameter {
                name: "wave_speed",
                value: wave_speed,
                constraint: "c > 0",
            });
        }
        if !(damping >= 0.0) || !damping.is_finite() {
            return Err(SolverError::InvalidParameter {
                name: "damping",
                value: damping,
                constraint: "b >= 0",
            });
        }
        Ok(Self { profile: Box::new(profile), epsilon, wave_speed, damping })
    }

    /// Smoothed initial datum `f(xi) H_eps(xi)`.
    pub fn initial(&self, xi: f64) -> f64 {
        (self.profile)(xi) * smoothed_heaviside(xi, self.epsilon).expect("epsilon validated")
    }

    /// d/dxi of the initial datum, by central differences.
    fn initial_slope(&self, xi: f64) -> f64 {
        let h = 1e-6 * xi.abs().max(1.0);
        (self.initial(xi + h) - self.initial(xi - h)) / (2.0 * h)
    }
}

/// Two-term reflected solution
///
/// ```text
/// u(t,x) = f(a) H_eps(a) / (b t f(a) H_eps(a) + 1)
///        + f(r) H_eps(r) / (b t f(a) H_eps(r) - 1)
/// ```
///
/// with `a = x - c t` and `r = -x - c t`. With `b = 0` this reduces to the
/// transported and reflected initial datum; for `x = 0` the value is only
/// O(b t) small rather than exactly zero.
///
/// Errors with a characteristic-crossing report when a denominator collapses
/// (for `b f >= 0` and constant wave speed this never happens).
pub fn moc_scalar_solution(oracle: &MocOracle, t: f64, x: f64) -> Result<f64> {
    let b = oracle.damping;
    let a = x - oracle.wave_speed * t;
    let r = -x - oracle.wave_speed * t;
    let fa = oracle.initial(a);
    let fr = oracle.initial(r);
    let mixed =
        (oracle.profile)(a) * smoothed_heaviside(r, oracle.epsilon).expect("epsilon validated");

    let den_direct = b * t * fa + 1.0;
    let den_reflected = b * t * mixed - 1.0;
    if den_direct.abs() < 1e-12 || den_reflected.abs() < 1e-12 {
        let t_star = if b * fa < 0.0 { -1.0 / (b * fa) } else { t };
        return Err(SolverError::CharacteristicsCross { t, t_star });
    }
    Ok(fa / den_direct + fr / den_reflected)
}

/// Earliest positive time at which characteristics cross, scanning initial
/// positions `xi` over `xi_range`. The crossing condition is the vanishing of
///
/// ```text
/// (b f(xi) H_eps(xi) t + 1)^2 + [f H_eps]'(xi) c'(u(t)) t
/// ```
///
/// where `u(t) = f H_eps / (b f H_eps t + 1)` is the value carried along the
/// characteristic. Returns `f64::INFINITY` when no root exists (e.g. constant
/// wave speed with `b f >= 0`).
pub fn critical_time(
    oracle: &MocOracle,
    wave_speed_derivative: impl Fn(f64) -> f64,
    xi_range: (f64, f64),
    n_samples: usize,
) -> f64 {
    let (lo, hi) = xi_range;
    let n = n_samples.max(3);
    let mut earliest = f64::INFINITY;
    for i in 0..n {
        let xi = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let phi0 = oracle.initial(xi);
        let slope = oracle.initial_slope(xi);
        let denom = |t: f64| {
            let packed = oracle.damping * phi0 * t + 1.0;
            let u = if packed.abs() > 1e-300 { phi0 / packed } else { 0.0 };
            packed * packed + slope * wave_speed_derivative(u) * t
        };
        if let Some(root) = earliest_positive_root(&denom) {
            earliest = earliest.min(root);
        }
    }
    earliest
}

/// Scans a log-spaced time grid for the first sign change (or tangency dip) of
/// `g` and refines it by bisection. `g(0+) = 1` by construction upstream.
fn earliest_positive_root(g: &impl Fn(f64) -> f64) -> Option<f64> {
    let mut t_prev = 0.0;
    let decades = 18; // 1e-9 ..= 1e9
    let per_decade = 24;
    for k in 0..=decades * per_decade {
        let t = 1e-9 * 10f64.powf(k as f64 / per_decade as f64);
        if g(t) <= 0.0 {
            return Some(bisect(g, t_prev, t));
        }
        t_prev = t;
    }
    None
}

fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Marches characteristics `x_i' = c(u_i)`, `u_i' = -b |u_i|^2` from sampled
/// initial positions until two adjacent curves cross, returning that time.
/// Independent of the closed-form crossing formula, so the two can be checked
/// against each other.
pub fn first_characteristic_crossing(
    oracle: &MocOracle,
    wave_speed: impl Fn(f64) -> f64,
    xi_range: (f64, f64),
    n_curves: usize,
    dt: f64,
    t_max: f64,
) -> Option<f64> {
    let (lo, hi) = xi_range;
    let n = n_curves.max(3);
    let mut x: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let mut u: Vec<f64> = x.iter().map(|&xi| oracle.initial(xi)).collect();
    let mut t = 0.0;
    while t < t_max {
        for i in 0..n {
            x[i] += wave_speed(u[i]) * dt;
            // d u / d t = -b |u|^2 along the characteristic.
            u[i] -= oracle.damping * u[i] * u[i] * dt;
        }
        t += dt;
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Some(t);
        }
    }
    None
}

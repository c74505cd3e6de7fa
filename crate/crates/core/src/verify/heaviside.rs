//! Closed-form C^2 mollified Heaviside step.

use crate::error::{Result, SolverError};

/// Smoothed Heaviside: 0 for `x <= -epsilon`, 1 for `x >= epsilon`, and the
/// quintic ramp `6u^5 - 15u^4 + 10u^3` (with `u = (x + epsilon)/(2 epsilon)`)
/// in between. The ramp has vanishing first and second derivatives at both
/// ends, so the piecewise function is C^2, monotone, equals 1/2 at x = 0, and
/// converges pointwise to the unit step as epsilon -> 0.
pub fn smoothed_heaviside(x: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(SolverError::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            constraint: "epsilon > 0",
        });
    }
    if x <= -epsilon {
        Ok(0.0)
    } else if x >= epsilon {
        Ok(1.0)
    } else {
        let u = (x + epsilon) / (2.0 * epsilon);
        Ok(u * u * u * (10.0 + u * (-15.0 + 6.0 * u)))
    }
}

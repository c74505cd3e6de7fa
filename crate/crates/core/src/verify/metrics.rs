//! Oscillation metrics for post-closure probe signals.

use crate::error::{Result, SolverError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationMetrics {
    /// `(max - plateau) / |reference amplitude|`; zero for monotone signals.
    pub overshoot: f64,
    /// Sum of absolute successive differences.
    pub total_variation: f64,
}

/// Overshoot and total variation of a probe series.
///
/// The plateau is taken as the median of the samples in the upper half of the
/// signal's range, which ignores the scheme's ringing around the top level.
/// `reference_amplitude` is the expected jump height (for pressure probes, the
/// Joukowsky surge).
pub fn oscillation_metrics(values: &[f64], reference_amplitude: f64) -> Result<OscillationMetrics> {
    if values.is_empty() {
        return Err(SolverError::InsufficientData("empty probe series".into()));
    }
    if !(reference_amplitude.abs() > 0.0) || !reference_amplitude.is_finite() {
        return Err(SolverError::InvalidParameter {
            name: "reference_amplitude",
            value: reference_amplitude,
            constraint: "nonzero finite amplitude",
        });
    }
    let total_variation = values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();

    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let threshold = vmin + 0.5 * (vmax - vmin);
    let mut upper: Vec<f64> = values.iter().cloned().filter(|&y| y >= threshold).collect();
    upper.sort_by(f64::total_cmp);
    let plateau = upper[upper.len() / 2];
    let overshoot = ((vmax - plateau) / reference_amplitude.abs()).max(0.0);

    Ok(OscillationMetrics { overshoot, total_variation })
}

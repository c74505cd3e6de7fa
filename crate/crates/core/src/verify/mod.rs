//! Numerical checks of the scheme's claimed properties: order of accuracy,
//! weak-form residuals on the post-closure solution, method-of-characteristics
//! oracles, and oscillation metrics.

pub mod heaviside;
pub mod metrics;
pub mod moc;
pub mod order;
pub mod weak;

pub use heaviside::smoothed_heaviside;
pub use metrics::{oscillation_metrics, OscillationMetrics};
pub use moc::{critical_time, first_characteristic_crossing, moc_scalar_solution, MocOracle};
pub use order::{observed_order, OrderReport, OrderStudy};
pub use weak::{weak_residual, BumpTestFunction, TestFunction, WeakConfig, WeakResidualReport};

//! 1-D transient pipe flow with an instantaneously closing valve.
//!
//! The solver marches the friction-damped pipeline equations for density and
//! velocity with a nonlinear Lax-Wendroff scheme: second-order Taylor steps in
//! time with every time derivative rewritten through central spatial
//! differences. A pipe of length `2L` connects two reservoirs; at `t_close` a
//! valve at `x = L` shuts instantly, the domain truncates to `[0, L]`, and the
//! pressure transient (water hammer) develops against the hard wall.
//!
//! The [`verify`] module holds the numerical harness for the scheme's claimed
//! properties: observed order of accuracy, CFL stability behavior, a discrete
//! weak-form residual on the post-closure solution, and closed-form
//! method-of-characteristics oracles.

pub mod boundary;
pub mod driver;
pub mod error;
pub mod grid;
pub mod params;
pub mod scenario;
pub mod scheme;
pub mod state;
pub mod verify;

pub use error::{MonitorKind, Result, SolverError};
pub use grid::Grid;
pub use params::FluidParams;
pub use scenario::{Profile, Scenario};
pub use state::{Phase, State};

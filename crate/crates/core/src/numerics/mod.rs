//! Quadrature engines and the spectral free-propagation reference.
//!
//! Nothing in here depends on the packet module.

pub mod oscillatory;
pub mod quadrature;
pub mod spectral;

pub use oscillatory::{integrate_damped_oscillatory, GaussianPhaseIntegral};
pub use quadrature::{integrate_adaptive, Integrator, QuadValue, QuadratureResult, Tolerance};
pub use spectral::{plan_grid, propagate_spectral, GridState};

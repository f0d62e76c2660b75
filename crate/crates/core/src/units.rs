//! SI ↔ dimensionless conversion.
//!
//! Everything downstream of this module works in units where ħ = m = 1 and
//! lengths are measured in the initial packet width σ0. The derived scales are
//!
//! * length:   σ0
//! * time:     m σ0² / ħ
//! * momentum: ħ / σ0
//! * velocity: ħ / (m σ0)

use crate::error::{Error, Result};

/// Reduced Planck constant (CODATA 2018, exact in the revised SI), J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    mass_si: f64,
    sigma0_si: f64,
}

impl UnitSystem {
    pub fn new(mass_si: f64, sigma0_si: f64) -> Result<Self> {
        if !(mass_si.is_finite() && mass_si > 0.0) {
            return Err(Error::domain(format!("mass must be positive and finite, got {mass_si}")));
        }
        if !(sigma0_si.is_finite() && sigma0_si > 0.0) {
            return Err(Error::domain(format!("sigma0 must be positive and finite, got {sigma0_si}")));
        }
        Ok(Self { mass_si, sigma0_si })
    }

    pub fn mass_si(&self) -> f64 {
        self.mass_si
    }

    pub fn sigma0_si(&self) -> f64 {
        self.sigma0_si
    }

    pub fn hbar_si(&self) -> f64 {
        HBAR_SI
    }

    pub fn length_unit_si(&self) -> f64 {
        self.sigma0_si
    }

    /// m σ0² / ħ in seconds.
    pub fn time_unit_si(&self) -> f64 {
        self.mass_si * self.sigma0_si * self.sigma0_si / HBAR_SI
    }

    /// ħ / σ0 in kg·m/s.
    pub fn momentum_unit_si(&self) -> f64 {
        HBAR_SI / self.sigma0_si
    }

    /// ħ / (m σ0) in m/s.
    pub fn velocity_unit_si(&self) -> f64 {
        HBAR_SI / (self.mass_si * self.sigma0_si)
    }

    pub fn length_to_dimensionless(&self, x_si: f64) -> f64 {
        x_si / self.length_unit_si()
    }

    pub fn length_to_si(&self, x: f64) -> f64 {
        x * self.length_unit_si()
    }

    pub fn time_to_dimensionless(&self, t_si: f64) -> f64 {
        t_si / self.time_unit_si()
    }

    pub fn time_to_si(&self, t: f64) -> f64 {
        t * self.time_unit_si()
    }

    /// A density per unit dimensionless time, expressed per second.
    pub fn rate_to_si(&self, density: f64) -> f64 {
        density / self.time_unit_si()
    }

    /// p̃ = m v σ0 / ħ.
    pub fn momentum_from_velocity(&self, v_si: f64) -> f64 {
        self.mass_si * v_si * self.sigma0_si / HBAR_SI
    }

    pub fn velocity_from_momentum(&self, p: f64) -> f64 {
        p * self.velocity_unit_si()
    }
}

/// Convenience wrapper matching the operation name used by the CLI.
pub fn make_unit_system(mass_si: f64, sigma0_si: f64) -> Result<UnitSystem> {
    UnitSystem::new(mass_si, sigma0_si)
}

pub fn momentum_from_velocity(v_si: f64, units: &UnitSystem) -> f64 {
    units.momentum_from_velocity(v_si)
}

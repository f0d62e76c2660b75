use std::f64::consts::PI;

use num_complex::Complex64;

use super::{arrival_time_scale, ArrivalDistribution};
use crate::error::{Error, Kind, Result};
use crate::numerics::GaussianPhaseIntegral;
use crate::packet::PacketSpec;

/// Relative accuracy requested from each momentum-space contour integral.
const MOMENTUM_TOL: f64 = 1e-10;

/// Kijowski's density for right-moving arrivals at a point x_d (ħ = m = 1):
///
/// Π_K(t) = (1/2π) |∫_0^∞ √p φ̃(p) e^{i(p x_d − p²t/2)} dp|² / N_K,
/// N_K = ∫_0^∞ |φ̃(p)|² dp.
///
/// For a Gaussian term φ̃ carries e^{−i p x0}, so each term contributes one
/// [`GaussianPhaseIntegral`] with linear phase coefficient x_d − x0.
#[derive(Debug, Clone)]
pub struct KijowskiDistribution {
    spec: PacketSpec,
    x_d: f64,
    norm: f64,
    scale: f64,
}

impl KijowskiDistribution {
    pub fn new(spec: &PacketSpec, x_d: f64) -> Result<Self> {
        let norm = spec.momentum_mass(true)?;
        if !(norm > 1e-14) {
            return Err(Error::degenerate(Kind::Kijowski, format!("no right-moving component (mass {norm:e})")));
        }
        Ok(Self { spec: spec.clone(), x_d, norm, scale: arrival_time_scale(spec, x_d) })
    }

    /// The complex amplitude whose squared modulus over 2π is the raw density.
    pub fn amplitude(&self, t: f64) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for term in self.spec.terms() {
            let s2 = term.width * term.width;
            let g = GaussianPhaseIntegral::new(s2, term.momentum, self.x_d - term.center, t)?;
            let prefactor = term.width * std::f64::consts::SQRT_2 * (2.0 * PI * s2).powf(-0.25);
            total += term.weight * prefactor * g.contour(MOMENTUM_TOL)?.value;
        }
        Ok(total)
    }
}

impl ArrivalDistribution for KijowskiDistribution {
    fn kind(&self) -> Kind {
        Kind::Kijowski
    }

    fn raw(&self, t: f64) -> Result<f64> {
        Ok(self.amplitude(t)?.norm_sqr() / (2.0 * PI))
    }

    fn raw_norm(&self) -> f64 {
        self.norm
    }

    fn domain_start(&self) -> f64 {
        f64::NEG_INFINITY
    }

    fn time_scale(&self) -> f64 {
        self.scale
    }
}

use super::{arrival_time_scale, ArrivalDistribution};
use crate::error::{Error, Kind, Result};
use crate::packet::PacketSpec;

/// Pushforward of the momentum distribution under t = (x_d − ⟨x⟩)/p:
///
/// Π_SC(t) = |x_d − x̄| / t² · |φ̃((x_d − x̄)/t)|² / N_SC, t > 0,
///
/// with N_SC the momentum mass directed toward the detector.
#[derive(Debug, Clone)]
pub struct SemiClassicalDistribution {
    spec: PacketSpec,
    distance: f64,
    norm: f64,
    scale: f64,
}

impl SemiClassicalDistribution {
    pub fn new(spec: &PacketSpec, x_d: f64) -> Result<Self> {
        let distance = x_d - spec.centroid();
        if distance.abs() < 1e-12 {
            return Err(Error::degenerate(Kind::SemiClassical, "detector sits on the packet centroid"));
        }
        let norm = spec.momentum_mass(distance > 0.0)?;
        if !(norm > 1e-14) {
            return Err(Error::degenerate(
                Kind::SemiClassical,
                format!("no momentum directed toward the detector (mass {norm:e})"),
            ));
        }
        Ok(Self { spec: spec.clone(), distance, norm, scale: arrival_time_scale(spec, x_d) })
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }
}

impl ArrivalDistribution for SemiClassicalDistribution {
    fn kind(&self) -> Kind {
        Kind::SemiClassical
    }

    fn raw(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let p = self.distance / t;
        Ok(self.distance.abs() / (t * t) * self.spec.psi_momentum(p).norm_sqr())
    }

    fn raw_norm(&self) -> f64 {
        self.norm
    }

    fn domain_start(&self) -> f64 {
        0.0
    }

    fn time_scale(&self) -> f64 {
        self.scale
    }
}

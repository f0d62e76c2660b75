use super::{arrival_time_scale, time_integrator, ArrivalDistribution};
use crate::error::{Error, Kind, Result};
use crate::packet::PacketSpec;

/// Π_F(t) = J(x_d, t) / ∫_0^∞ J(x_d, t) dt.
///
/// The raw current is kept signed; backflow shows up as negative density.
#[derive(Debug, Clone)]
pub struct FluxDistribution {
    spec: PacketSpec,
    x_d: f64,
    norm: f64,
    scale: f64,
}

impl FluxDistribution {
    pub fn new(spec: &PacketSpec, x_d: f64) -> Result<Self> {
        let scale = arrival_time_scale(spec, x_d);
        let current = |t: f64| spec.flux(x_d, t);
        let norm = time_integrator().to_infinity(&current, 0.0, scale)?.value;
        if !(norm > 1e-14) {
            return Err(Error::degenerate(
                Kind::Flux,
                format!("∫_0^∞ J(x_d = {x_d}, t) dt = {norm:e}; the state never crosses the detector rightward"),
            ));
        }
        Ok(Self { spec: spec.clone(), x_d, norm, scale })
    }

    pub fn detector(&self) -> f64 {
        self.x_d
    }

    /// Smallest raw current over the sampled times, or 0 if none is negative.
    pub fn backflow(&self, times: &[f64]) -> f64 {
        times.iter().map(|&t| self.spec.flux(self.x_d, t)).fold(0.0, f64::min)
    }
}

impl ArrivalDistribution for FluxDistribution {
    fn kind(&self) -> Kind {
        Kind::Flux
    }

    fn raw(&self, t: f64) -> Result<f64> {
        Ok(self.spec.flux(self.x_d, t))
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packet::PacketSpec;

    #[test]
    fn norm_matches_probability_balance() {
        // ∫_0^∞ J dt = P(p > 0) − P(x > x_d at t = 0)
        for &(x0, s, p0, xd) in &[(-6.0, 1.0, 1.2, 0.0), (-2.0, 0.6, 0.3, 1.0), (1.0, 1.5, 2.0, 0.0)] {
            let spec = PacketSpec::gaussian(x0, s, p0).unwrap();
            let f = FluxDistribution::new(&spec, xd).unwrap();
            let right_initially = spec.interval_mass(xd, x0 + 40.0 * s + 40.0, 0.0).unwrap();
            let expected = spec.momentum_mass(true).unwrap() - right_initially;
            assert!((f.raw_norm() - expected).abs() < 1e-10, "{} vs {expected}", f.raw_norm());
            assert!((f.mass_between(0.0, f64::INFINITY).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn odd_state_at_node_is_degenerate() {
        let spec = PacketSpec::odd_pair(3.0, 1.0).unwrap();
        let err = FluxDistribution::new(&spec, 0.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateNormalization { kind: Kind::Flux, .. }));
    }
}

//! The four arrival-time densities and the two non-arrival probabilities.
//!
//! K, F and SC are built for a point detector and normalized over their
//! natural time domain (ℝ for K, [0, ∞) for F and SC). QC takes either a point
//! or an interval and is normalized over a finite window of length T.

mod clock;
mod flux;
mod kijowski;
mod nonarrival;
mod semiclassical;

pub use clock::{QcWindow, QuantumClock};
pub use flux::FluxDistribution;
pub use kijowski::KijowskiDistribution;
pub use nonarrival::{nonarrival_curve, nonarrival_kfsc, nonarrival_qc};
pub use semiclassical::SemiClassicalDistribution;

use crate::error::{Error, Kind, Result};
use crate::numerics::{Integrator, Tolerance};
use crate::packet::{Detector, PacketSpec};

/// Tolerance used for time integrals of normalized densities.
pub(crate) fn time_integrator() -> Integrator {
    Integrator::new(Tolerance::new(1e-13, 1e-11)).with_max_panels(20_000)
}

/// Rough time for the bulk of `spec` to reach `x_d`: distance over the
/// faster of drift and spreading speed, maximized over terms. Used only to
/// split time integrals; results do not depend on it.
pub(crate) fn arrival_time_scale(spec: &PacketSpec, x_d: f64) -> f64 {
    spec.terms()
        .iter()
        .map(|t| (((x_d - t.center).abs() + 10.0 * t.width) / (t.momentum.abs() + 0.5 / t.width)).max(2.0 * t.width * t.width))
        .fold(1.0, f64::max)
}

/// A normalized arrival-time density at a point detector.
pub trait ArrivalDistribution: Send + Sync {
    fn kind(&self) -> Kind;

    /// Un-normalized density.
    fn raw(&self, t: f64) -> Result<f64>;

    /// Mass of `raw` over the natural domain; densities are `raw / raw_norm`.
    fn raw_norm(&self) -> f64;

    /// Lower end of the natural domain (−∞ for K, 0 for F and SC).
    fn domain_start(&self) -> f64;

    /// Characteristic arrival time, used to split improper integrals.
    fn time_scale(&self) -> f64;

    fn density(&self, t: f64) -> Result<f64> {
        Ok(self.raw(t)? / self.raw_norm())
    }

    /// ∫_{t1}^{t2} density. Bounds may be infinite.
    fn mass_between(&self, t1: f64, t2: f64) -> Result<f64> {
        let engine = time_integrator();
        let f = |t: f64| self.density(t).unwrap_or(f64::NAN);
        let knee = self.time_scale();
        let r = match (t1.is_finite(), t2.is_finite()) {
            (true, true) => engine.integrate(f, t1, t2)?,
            (true, false) => engine.to_infinity(&f, t1, knee.max(t1 + knee))?,
            (false, true) => {
                let g = |s: f64| f(-s);
                engine.to_infinity(&g, -t2, knee.max(-t2 + knee))?
            }
            (false, false) => {
                let g = |s: f64| f(-s);
                let right = engine.to_infinity(&f, 0.0, knee)?;
                let left = engine.to_infinity(&g, 0.0, knee)?;
                return Ok(right.value + left.value);
            }
        };
        Ok(r.value)
    }

    fn sample(&self, times: &[f64]) -> Result<ToaDistribution> {
        let samples = times.iter().map(|&t| Ok((t, self.density(t)?))).collect::<Result<Vec<_>>>()?;
        ToaDistribution::new(
            self.kind(),
            samples,
            NormMeta { raw_norm: self.raw_norm(), window: (self.domain_start(), f64::INFINITY) },
        )
    }
}

/// Builds the K, F or SC distribution for a point detector at `x_d`.
pub fn point_distribution(kind: Kind, spec: &PacketSpec, x_d: f64) -> Result<Box<dyn ArrivalDistribution>> {
    Ok(match kind {
        Kind::Kijowski => Box::new(KijowskiDistribution::new(spec, x_d)?),
        Kind::Flux => Box::new(FluxDistribution::new(spec, x_d)?),
        Kind::SemiClassical => Box::new(SemiClassicalDistribution::new(spec, x_d)?),
        Kind::QuantumClock => {
            return Err(Error::domain("the quantum clock density needs a window; use QuantumClock"));
        }
    })
}

pub(crate) fn require_point(detector: &Detector, what: &str) -> Result<f64> {
    match *detector {
        Detector::Point { x } => Ok(x),
        Detector::Interval { .. } => Err(Error::domain(format!("{what} is defined for point detectors only"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormMeta {
    /// Probability mass before renormalization.
    pub raw_norm: f64,
    /// Domain the density integrates to one over.
    pub window: (f64, f64),
}

/// A sampled, named arrival-time density.
#[derive(Debug, Clone, PartialEq)]
pub struct ToaDistribution {
    pub kind: Kind,
    pub samples: Vec<(f64, f64)>,
    pub norm_meta: NormMeta,
}

impl ToaDistribution {
    pub fn new(kind: Kind, samples: Vec<(f64, f64)>, norm_meta: NormMeta) -> Result<Self> {
        if samples.iter().any(|(t, d)| !t.is_finite() || !d.is_finite()) {
            return Err(Error::domain(format!("{kind} samples must be finite")));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::domain("sample times must be strictly increasing"));
        }
        Ok(Self { kind, samples, norm_meta })
    }

    /// (t, density) of the largest sample.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.samples.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn sup_distance(&self, other: &ToaDistribution) -> f64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| (a.1 - b.1).abs()).fold(0.0, f64::max)
    }
}

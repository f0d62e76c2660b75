use rayon::prelude::*;

use super::{point_distribution, require_point, ArrivalDistribution, QcWindow, QuantumClock};
use crate::error::{Error, Kind, Result};
use crate::packet::{Detector, PacketSpec};

/// P_QC(na | ψ) = 1 − (1/T) ∫_window ∫_D |ψ(x,t)|² dx dt.
pub fn nonarrival_qc(spec: &PacketSpec, detector: Detector, window: f64, kind: QcWindow) -> Result<f64> {
    QuantumClock::new(spec, detector, kind).nonarrival(window)
}

/// P(na | ψ) = ∫_T^∞ Π(t) dt for K, F or SC at a point detector.
pub fn nonarrival_kfsc(kind: Kind, spec: &PacketSpec, detector: Detector, cutoff: f64) -> Result<f64> {
    let x_d = require_point(&detector, "the K/F/SC non-arrival probability")?;
    let dist = point_distribution(kind, spec, x_d)?;
    Ok(nonarrival_curve(dist.as_ref(), &[cutoff])?[0])
}

/// ∫_T^∞ Π for each cutoff, computed as 1 − ∫_{start}^{T} Π so that the
/// infinite tail is never truncated. Cutoffs must be nonnegative and
/// nondecreasing.
pub fn nonarrival_curve(dist: &dyn ArrivalDistribution, cutoffs: &[f64]) -> Result<Vec<f64>> {
    if cutoffs.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return Err(Error::domain("cutoff times must be finite and nonnegative"));
    }
    if cutoffs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("cutoff times must be nondecreasing"));
    }
    let start = dist.domain_start();
    let edges: Vec<(f64, f64)> = cutoffs
        .iter()
        .enumerate()
        .map(|(i, &t)| (if i == 0 { start } else { cutoffs[i - 1] }, t))
        .collect();
    let pieces =
        edges.par_iter().map(|&(a, b)| if a == b { Ok(0.0) } else { dist.mass_between(a, b) }).collect::<Result<Vec<_>>>()?;
    let mut acc = 0.0;
    Ok(pieces
        .into_iter()
        .map(|m| {
            acc += m;
            1.0 - acc
        })
        .collect())
}

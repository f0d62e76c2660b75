use rayon::prelude::*;

use super::{arrival_time_scale, NormMeta, ToaDistribution};
use crate::error::{Error, Kind, Result};
use crate::numerics::{Integrator, Tolerance};
use crate::packet::{Detector, PacketSpec};

/// Which times a window of length T covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QcWindow {
    /// [−T/2, T/2], with the state continued backwards in time for t < 0.
    #[default]
    Symmetric,
    /// [0, T].
    Forward,
}

impl QcWindow {
    pub fn bounds(self, window: f64) -> (f64, f64) {
        match self {
            QcWindow::Symmetric => (-0.5 * window, 0.5 * window),
            QcWindow::Forward => (0.0, window),
        }
    }

    /// Number of 1/|t| tails of ρ_D the window collects.
    pub fn tails(self) -> f64 {
        match self {
            QcWindow::Symmetric => 2.0,
            QcWindow::Forward => 1.0,
        }
    }
}

/// The windowed density Π_QC(t; T) = ρ_D(t) / N_QC(T) with
/// N_QC(T) = ∫_window ρ_D(t) dt.
#[derive(Debug, Clone)]
pub struct QuantumClock {
    spec: PacketSpec,
    detector: Detector,
    window: QcWindow,
    scale: f64,
}

impl QuantumClock {
    pub fn new(spec: &PacketSpec, detector: Detector, window: QcWindow) -> Self {
        let scale = arrival_time_scale(spec, detector.center());
        Self { spec: spec.clone(), detector, window, scale }
    }

    pub fn detector(&self) -> Detector {
        self.detector
    }

    pub fn window(&self) -> QcWindow {
        self.window
    }

    /// ρ_D(t): |ψ(x_d, t)|² for a point, ∫_D |ψ|² for an interval.
    pub fn rho(&self, t: f64) -> Result<f64> {
        self.detector.region_density(&self.spec, t)
    }

    /// ∫_lo^hi ρ_D, with log-time substitution beyond the arrival scale.
    pub fn rho_integral(&self, lo: f64, hi: f64) -> Result<f64> {
        if hi < lo {
            return Ok(-self.rho_integral(hi, lo)?);
        }
        let mut total = 0.0;
        if hi > 0.0 {
            total += self.positive_side(lo.max(0.0), hi, |t| self.rho(t))?;
        }
        if lo < 0.0 {
            total += self.positive_side((-hi).max(0.0), -lo, |s| self.rho(-s))?;
        }
        Ok(total)
    }

    fn positive_side<F: Fn(f64) -> Result<f64>>(&self, lo: f64, hi: f64, f: F) -> Result<f64> {
        let engine = Integrator::new(Tolerance::new(1e-16, 1e-12)).with_max_panels(20_000);
        let g = |t: f64| f(t).unwrap_or(f64::NAN);
        let knee = self.scale;
        let mut total = 0.0;
        if lo < knee {
            total += engine.integrate(g, lo, hi.min(knee))?.value;
        }
        if hi > knee {
            total += engine.log_scale(g, lo.max(knee), hi)?.value;
        }
        Ok(total)
    }

    /// N_QC(T).
    pub fn denominator(&self, window: f64) -> Result<f64> {
        check_window(window)?;
        let (lo, hi) = self.window.bounds(window);
        self.rho_integral(lo, hi)
    }

    /// N_QC for an increasing list of window lengths, accumulated shell by
    /// shell so that the sequence is monotone by construction.
    pub fn denominators(&self, windows: &[f64]) -> Result<Vec<f64>> {
        for &w in windows {
            check_window(w)?;
        }
        if windows.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("window lengths must be strictly increasing"));
        }
        let shells: Vec<(f64, f64)> = std::iter::once((0.0, windows.first().copied().unwrap_or(0.0)))
            .chain(windows.windows(2).map(|w| (w[0], w[1])))
            .take(windows.len())
            .collect();
        let increments = shells
            .par_iter()
            .map(|&(from, to)| {
                let (lo_new, hi_new) = self.window.bounds(to);
                if from == 0.0 {
                    return self.rho_integral(lo_new, hi_new);
                }
                let (lo_old, hi_old) = self.window.bounds(from);
                Ok(self.rho_integral(hi_old, hi_new)? + self.rho_integral(lo_new, lo_old)?)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut acc = 0.0;
        Ok(increments
            .into_iter()
            .map(|inc| {
                acc += inc;
                acc
            })
            .collect())
    }

    pub fn contains(&self, t: f64, window: f64) -> bool {
        let (lo, hi) = self.window.bounds(window);
        t >= lo && t <= hi
    }

    /// Π_QC(t; T) given a precomputed N_QC(T).
    pub fn density_with_denominator(&self, t: f64, window: f64, denominator: f64) -> Result<f64> {
        if !self.contains(t, window) {
            let (lo, hi) = self.window.bounds(window);
            return Err(Error::domain(format!("t = {t} lies outside the window [{lo}, {hi}]")));
        }
        if !(denominator > 0.0) {
            return Err(Error::degenerate(Kind::QuantumClock, format!("N_QC(T = {window}) = {denominator:e}")));
        }
        Ok(self.rho(t)? / denominator)
    }

    /// Π_QC(t; T).
    pub fn density(&self, t: f64, window: f64) -> Result<f64> {
        let n = self.denominator(window)?;
        self.density_with_denominator(t, window, n)
    }

    pub fn sample(&self, times: &[f64], window: f64) -> Result<ToaDistribution> {
        let n = self.denominator(window)?;
        let samples = times
            .iter()
            .map(|&t| Ok((t, self.density_with_denominator(t, window, n)?)))
            .collect::<Result<Vec<_>>>()?;
        ToaDistribution::new(Kind::QuantumClock, samples, NormMeta { raw_norm: n, window: self.window.bounds(window) })
    }

    /// ∫_{t1}^{t2} Π_QC(t; T) dt for each T, sharing the numerator.
    pub fn arrival_probabilities(&self, t1: f64, t2: f64, windows: &[f64]) -> Result<Vec<f64>> {
        for &w in windows {
            if !(self.contains(t1, w) && self.contains(t2, w)) {
                return Err(Error::domain(format!("[{t1}, {t2}] is not inside the window of length {w}")));
            }
        }
        let numerator = self.rho_integral(t1, t2)?;
        let dens = self.denominators(windows)?;
        dens.into_iter()
            .zip(windows)
            .map(|(n, w)| {
                if n > 0.0 {
                    Ok(numerator / n)
                } else {
                    Err(Error::degenerate(Kind::QuantumClock, format!("N_QC(T = {w}) = {n:e}")))
                }
            })
            .collect()
    }

    /// Closed-form ln T slope of N_QC: tails × |φ̃(0)|², times ΔL for intervals.
    pub fn predicted_log_slope(&self) -> f64 {
        let geometry = self.detector.length().unwrap_or(1.0);
        self.window.tails() * geometry * self.spec.momentum_density_at_zero()
    }

    /// P_QC(na) = 1 − N_QC(T)/T; only defined for intervals.
    pub fn nonarrival(&self, window: f64) -> Result<f64> {
        self.require_interval()?;
        Ok(1.0 - self.denominator(window)? / window)
    }

    pub(crate) fn require_interval(&self) -> Result<()> {
        match self.detector {
            Detector::Interval { .. } => Ok(()),
            Detector::Point { .. } => Err(Error::DimensionalInconsistency("the quantum-clock non-arrival probability")),
        }
    }
}

fn check_window(window: f64) -> Result<()> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::domain(format!("window length must be positive and finite, got {window}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_rho_integral(clock: &QuantumClock, lo: f64, hi: f64, n: usize) -> f64 {
        // composite Simpson on a uniform grid
        let h = (hi - lo) / n as f64;
        let mut s = clock.rho(lo).unwrap() + clock.rho(hi).unwrap();
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * clock.rho(lo + k as f64 * h).unwrap();
        }
        s * h / 3.0
    }

    #[test]
    fn denominator_matches_uniform_grid() {
        let spec = PacketSpec::gaussian(-10.0, 1.0, 7.0).unwrap();
        let clock = QuantumClock::new(&spec, Detector::centered(1.0).unwrap(), QcWindow::Symmetric);
        for t in [1.0, 3.0, 10.0, 40.0] {
            let n = clock.denominator(t).unwrap();
            let bf = brute_force_rho_integral(&clock, -0.5 * t, 0.5 * t, 200_000);
            assert!((n - bf).abs() < 1e-9, "T={t}: {n} vs {bf}");
        }
    }

    #[test]
    fn cumulative_matches_direct() {
        let spec = PacketSpec::gaussian(-3.0, 1.0, 0.5).unwrap();
        let clock = QuantumClock::new(&spec, Detector::point(0.0).unwrap(), QcWindow::Symmetric);
        let ts = [2.0, 10.0, 100.0, 1e4, 1e6];
        let cum = clock.denominators(&ts).unwrap();
        for (t, c) in ts.iter().zip(&cum) {
            let direct = clock.denominator(*t).unwrap();
            assert!((c - direct).abs() < 1e-10 * direct.max(1.0), "{c} vs {direct}");
        }
    }

    #[test]
    fn normalized_over_window() {
        let spec = PacketSpec::gaussian(-5.0, 1.0, 1.0).unwrap();
        let clock = QuantumClock::new(&spec, Detector::point(0.0).unwrap(), QcWindow::Symmetric);
        let t_win = 60.0;
        let n = clock.denominator(t_win).unwrap();
        let mass = clock.rho_integral(-30.0, 30.0).unwrap() / n;
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outside_window_is_domain_error() {
        let spec = PacketSpec::gaussian(-5.0, 1.0, 1.0).unwrap();
        let clock = QuantumClock::new(&spec, Detector::point(0.0).unwrap(), QcWindow::Symmetric);
        assert!(matches!(clock.density(6.0, 10.0), Err(Error::Domain(_))));
        assert!(clock.density(-5.0, 10.0).is_ok());
        assert!(matches!(clock.denominator(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn node_detector_is_degenerate() {
        let spec = PacketSpec::odd_pair(2.0, 1.0).unwrap();
        let clock = QuantumClock::new(&spec, Detector::point(0.0).unwrap(), QcWindow::Symmetric);
        assert!(matches!(clock.density(1.0, 10.0), Err(Error::DegenerateNormalization { .. })));
    }

    #[test]
    fn point_nonarrival_is_rejected() {
        let spec = PacketSpec::gaussian(-5.0, 1.0, 1.0).unwrap();
        let clock = QuantumClock::new(&spec, Detector::point(0.0).unwrap(), QcWindow::Symmetric);
        assert!(matches!(clock.nonarrival(10.0), Err(Error::DimensionalInconsistency(_))));
    }
}

//! Long-window behaviour of the quantum-clock normalization.
//!
//! For large |t| a free state at fixed x behaves like
//! ψ(x,t) ≈ (it)^{-1/2} e^{ix²/2t} φ̃(x/t), so ρ_D(t) ≈ L·|φ̃(0)|²/|t| with
//! L = 1 for a point and L = ΔL for an interval. Each 1/|t| tail inside the
//! window adds L|φ̃(0)|²·ln T to N_QC(T); when φ̃(0) = 0 the denominator
//! stays bounded instead.

use crate::distributions::{QcWindow, QuantumClock};
use crate::error::{Error, Result};
use crate::packet::{Detector, PacketSpec};

/// Relative spread of the local slope dN/d ln T tolerated across a decade
/// before the sweep counts as logarithmic.
pub const REGIME_SLOPE_SPREAD: f64 = 0.02;

/// Last-decade relative growth below which a denominator counts as bounded.
pub const BOUNDED_GROWTH: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub window: f64,
    pub qc_denominator: f64,
    pub p_na_qc: Option<f64>,
    /// Non-arrival probabilities in K, F, SC order.
    pub p_na_kfsc: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSweep {
    rows: Vec<SweepRow>,
}

impl WindowSweep {
    pub fn new(rows: Vec<SweepRow>) -> Result<Self> {
        if rows.windows(2).any(|w| w[1].window <= w[0].window) {
            return Err(Error::domain("sweep windows must be strictly increasing"));
        }
        let bad_prob = |p: f64| !(-1e-6..=1.0 + 1e-6).contains(&p);
        for r in &rows {
            if r.p_na_qc.is_some_and(bad_prob) || r.p_na_kfsc.is_some_and(|ps| ps.into_iter().any(bad_prob)) {
                return Err(Error::domain(format!("non-arrival probability outside [0, 1] at T = {}", r.window)));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn windows(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.window).collect()
    }

    pub fn denominators(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.qc_denominator).collect()
    }

    pub fn with_kfsc(mut self, columns: [Vec<f64>; 3]) -> Result<Self> {
        for (i, row) in self.rows.iter_mut().enumerate() {
            row.p_na_kfsc = Some([columns[0][i], columns[1][i], columns[2][i]]);
        }
        Self::new(self.rows)
    }
}

/// N_QC(T) for every window length (and P_QC(na) for interval detectors).
pub fn qc_denominator_sweep(clock: &QuantumClock, windows: &[f64]) -> Result<WindowSweep> {
    let dens = clock.denominators(windows)?;
    let interval = matches!(clock.detector(), Detector::Interval { .. });
    let rows = windows
        .iter()
        .zip(dens)
        .map(|(&w, n)| SweepRow {
            window: w,
            qc_denominator: n,
            p_na_qc: interval.then(|| 1.0 - n / w),
            p_na_kfsc: None,
        })
        .collect();
    WindowSweep::new(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub fit_range: (f64, f64),
    pub points: usize,
}

impl LogFit {
    pub fn predict(&self, window: f64) -> f64 {
        self.slope * window.ln() + self.intercept
    }
}

/// Ordinary least squares of N against ln T over the sweep rows in `range`.
pub fn fit_log(sweep: &WindowSweep, range: (f64, f64)) -> Result<LogFit> {
    let points: Vec<(f64, f64)> = sweep
        .rows()
        .iter()
        .filter(|r| r.window >= range.0 && r.window <= range.1)
        .map(|r| (r.window, r.qc_denominator))
        .collect();
    fit_log_points(&points)
}

/// Fits y = a ln T + b to (T, y) pairs.
pub fn fit_log_points(points: &[(f64, f64)]) -> Result<LogFit> {
    if points.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 points, got {}", points.len())));
    }
    if points.iter().any(|&(t, y)| !(t > 0.0 && t.is_finite() && y.is_finite())) {
        return Err(Error::Fit("points need positive finite T and finite N".into()));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(t, y) in points {
        let dx = t.ln() - mean_x;
        sxx += dx * dx;
        sxy += dx * (y - mean_y);
    }
    let spread = points.iter().map(|p| p.0.ln()).fold(f64::NEG_INFINITY, f64::max)
        - points.iter().map(|p| p.0.ln()).fold(f64::INFINITY, f64::min);
    if !(sxx > 1e-12 * n * (1.0 + mean_x * mean_x)) || spread == 0.0 {
        return Err(Error::Fit("window lengths do not span a range of ln T".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = points.iter().map(|&(t, y)| (y - slope * t.ln() - intercept).powi(2)).sum();
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(LogFit { slope, intercept, residual_rms: (rss / n).sqrt(), fit_range: (lo, hi), points: points.len() })
}

/// dN/d ln T between consecutive rows, tagged with the left window.
pub fn local_slopes(sweep: &WindowSweep) -> Vec<(f64, f64)> {
    sweep
        .rows()
        .windows(2)
        .map(|w| (w[0].window, (w[1].qc_denominator - w[0].qc_denominator) / (w[1].window / w[0].window).ln()))
        .collect()
}

/// Smallest T from which the local slope varies by less than
/// [`REGIME_SLOPE_SPREAD`] across the following decade; returns the range
/// from there to the last window.
pub fn detect_log_regime(sweep: &WindowSweep) -> Option<(f64, f64)> {
    let slopes = local_slopes(sweep);
    let last = sweep.rows().last()?.window;
    for (i, &(t_start, _)) in slopes.iter().enumerate() {
        if t_start * 10.0 > last {
            break;
        }
        let decade: Vec<f64> = slopes[i..].iter().take_while(|(t, _)| *t < t_start * 10.0).map(|s| s.1).collect();
        if decade.len() < 2 {
            continue;
        }
        let mean = decade.iter().sum::<f64>() / decade.len() as f64;
        let max = decade.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = decade.iter().copied().fold(f64::INFINITY, f64::min);
        if mean > 0.0 && (max - min) / mean < REGIME_SLOPE_SPREAD {
            return Some((t_start, last));
        }
    }
    None
}

/// Relative growth of N over the last decade of the sweep.
pub fn last_decade_growth(sweep: &WindowSweep) -> Option<f64> {
    let rows = sweep.rows();
    let last = rows.last()?;
    let earlier = rows.iter().rev().find(|r| r.window <= last.window / 10.0)?;
    Some((last.qc_denominator - earlier.qc_denominator) / last.qc_denominator)
}

/// Outcome of checking the ln T divergence for one packet/detector.
#[derive(Debug, Clone)]
pub struct DivergenceReport {
    pub sweep: WindowSweep,
    pub predicted_slope: f64,
    pub fit: Option<LogFit>,
    pub last_decade_growth: Option<f64>,
}

impl DivergenceReport {
    pub fn relative_deviation(&self) -> Option<f64> {
        let fit = self.fit?;
        (self.predicted_slope > 0.0).then(|| (fit.slope - self.predicted_slope).abs() / self.predicted_slope)
    }

    /// True when the denominator has stopped growing (φ̃(0) = 0 branch).
    pub fn bounded(&self) -> bool {
        self.last_decade_growth.is_some_and(|g| g < BOUNDED_GROWTH)
    }
}

pub fn analyze_divergence(clock: &QuantumClock, windows: &[f64]) -> Result<DivergenceReport> {
    let sweep = qc_denominator_sweep(clock, windows)?;
    let fit = match detect_log_regime(&sweep) {
        Some(range) => Some(fit_log(&sweep, range)?),
        None => None,
    };
    let last_decade_growth = last_decade_growth(&sweep);
    Ok(DivergenceReport { predicted_slope: clock.predicted_log_slope(), fit, last_decade_growth, sweep })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingReport {
    pub windows: Vec<f64>,
    pub values: Vec<f64>,
}

impl VanishingReport {
    pub fn nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] < w[0])
    }

    /// last ≤ first · ln T_first / ln T_last · 1.1
    pub fn within_log_bound(&self) -> bool {
        match (self.windows.first(), self.windows.last(), self.values.first(), self.values.last()) {
            (Some(&t0), Some(&t1), Some(&v0), Some(&v1)) if t0 > 1.0 => v1 <= v0 * t0.ln() / t1.ln() * 1.1,
            _ => false,
        }
    }
}

/// Π_QC(t_probe; T) over the given windows.
pub fn verify_vanishing(
    spec: &PacketSpec,
    detector: Detector,
    window_kind: QcWindow,
    t_probe: f64,
    windows: &[f64],
) -> Result<VanishingReport> {
    let clock = QuantumClock::new(spec, detector, window_kind);
    if let Some(&w) = windows.iter().find(|&&w| !clock.contains(t_probe, w)) {
        return Err(Error::domain(format!("t_probe = {t_probe} is outside the window of length {w}")));
    }
    let rho = clock.rho(t_probe)?;
    let dens = clock.denominators(windows)?;
    let values = windows
        .iter()
        .zip(&dens)
        .map(|(&w, &n)| clock.density_with_denominator(t_probe, w, n).map(|_| rho / n))
        .collect::<Result<Vec<_>>>()?;
    Ok(VanishingReport { windows: windows.to_vec(), values })
}

/// n points per decade from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).round().max(1.0) as usize;
    (0..=n).map(|i| lo * 10f64.powf(decades * i as f64 / n as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_log_is_recovered_exactly() {
        let pts: Vec<(f64, f64)> = log_spaced(10.0, 1e6, 4).into_iter().map(|t| (t, 3.0 * t.ln() + 1.0)).collect();
        let fit = fit_log_points(&pts).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-10);
        assert!((fit.intercept - 1.0).abs() < 1e-9);
        assert!(fit.residual_rms < 1e-10);
    }

    #[test]
    fn too_few_or_degenerate_points() {
        assert!(matches!(fit_log_points(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]), Err(Error::Fit(_))));
        assert!(matches!(fit_log_points(&[(5.0, 1.0); 5]), Err(Error::Fit(_))));
    }

    #[test]
    fn point_detector_slope_matches_zero_momentum_density() {
        let spec = PacketSpec::gaussian(-2.0, 1.0, 0.5).unwrap();
        for window in [QcWindow::Symmetric, QcWindow::Forward] {
            let clock = QuantumClock::new(&spec, Detector::point(0.0).unwrap(), window);
            let report = analyze_divergence(&clock, &log_spaced(1.0, 1e8, 6)).unwrap();
            let dev = report.relative_deviation().expect("log regime");
            assert!(dev < 0.05, "{window:?}: {dev}");
            assert!(!report.bounded());
        }
    }

    #[test]
    fn odd_state_denominator_saturates() {
        let spec = PacketSpec::odd_pair(2.0, 1.0).unwrap();
        let clock = QuantumClock::new(&spec, Detector::point(1.5).unwrap(), QcWindow::Symmetric);
        let report = analyze_divergence(&clock, &log_spaced(1.0, 1e8, 6)).unwrap();
        assert!(report.bounded(), "{:?}", report.last_decade_growth);
        assert_eq!(report.predicted_slope, 0.0);
    }

    #[test]
    fn probe_density_decreases_with_window() {
        let spec = PacketSpec::gaussian(-20.0, 1.0, 1.0).unwrap();
        let report =
            verify_vanishing(&spec, Detector::point(0.0).unwrap(), QcWindow::Symmetric, 20.0, &log_spaced(100.0, 1e9, 2))
                .unwrap();
        assert!(report.strictly_decreasing());
        assert!(report.within_log_bound(), "{:?}", report.values);
    }

    #[test]
    fn probe_outside_window_is_rejected() {
        let spec = PacketSpec::gaussian(-20.0, 1.0, 1.0).unwrap();
        assert!(verify_vanishing(&spec, Detector::point(0.0).unwrap(), QcWindow::Symmetric, 80.0, &[100.0, 200.0]).is_err());
    }
}

//! Integrals of the form
//!
//! ```text
//! I = ∫_0^∞ √p · exp(−σ²(p − p0)²) · exp(i(p·d − p²t/2)) dp
//! ```
//!
//! i.e. a square-root weight, a Gaussian amplitude and a unit-modulus
//! quadratic phase. Writing the exponent as `−a p² + b p + c` with
//! `a = σ² + i t/2`, `b = 2σ²p0 + i d`, `c = −σ²p0²`, the integrand is entire
//! apart from the √p branch point, so the half line can be deformed onto a
//! path where the phase is stationary and the modulus decays like a Gaussian.
//!
//! Two evaluation routes are provided:
//!
//! * [`GaussianPhaseIntegral::contour`]: the production route. In the rotated
//!   variable `w = p·e^{iθ}`, `θ = arg(a)/2`, the quadratic part becomes
//!   `−|a|w²`. The path runs from 0 straight to `i·h` (`h = Im w_c`, the
//!   saddle height) and then horizontally through the saddle to `+∞`. The
//!   modulus on the vertical leg never exceeds its value at `p = 0` and the
//!   horizontal leg is a steepest-descent line, so nothing cancels.
//! * [`GaussianPhaseIntegral::real_axis`]: splits `[0, ∞)` at the stationary
//!   point `p* = d/t` and integrates the oscillating integrand directly. Cost
//!   grows with the number of oscillations, so it only serves moderate `t`
//!   and as an independent check of the contour route.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::quadrature::{Integrator, QuadratureResult, Tolerance};
use crate::error::{Error, Result};

/// Gaussian amplitude width beyond which the integrand is below e^{-81}.
const AMPLITUDE_REACH: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPhaseIntegral {
    /// σ² of the amplitude exp(−σ²(p − p0)²).
    pub sigma_sq: f64,
    /// Amplitude centre p0.
    pub p0: f64,
    /// Coefficient of the linear phase p·d.
    pub distance: f64,
    /// Coefficient of the quadratic phase −p²t/2.
    pub time: f64,
}

impl GaussianPhaseIntegral {
    pub fn new(sigma_sq: f64, p0: f64, distance: f64, time: f64) -> Result<Self> {
        if !(sigma_sq.is_finite() && sigma_sq > 0.0) {
            return Err(Error::domain(format!("amplitude width must be positive, got σ² = {sigma_sq}")));
        }
        if !(p0.is_finite() && distance.is_finite() && time.is_finite()) {
            return Err(Error::domain("oscillatory integral parameters must be finite"));
        }
        Ok(Self { sigma_sq, p0, distance, time })
    }

    fn a(&self) -> Complex64 {
        Complex64::new(self.sigma_sq, 0.5 * self.time)
    }

    fn b(&self) -> Complex64 {
        Complex64::new(2.0 * self.sigma_sq * self.p0, self.distance)
    }

    fn c(&self) -> f64 {
        -self.sigma_sq * self.p0 * self.p0
    }

    /// √p · e^{−a p² + b p + c} on the principal branch.
    pub fn integrand(&self, p: Complex64) -> Complex64 {
        let q = -self.a() * p * p + self.b() * p + self.c();
        p.sqrt() * q.exp()
    }

    /// Stationary point of the real-axis phase, if it lies on (0, ∞).
    pub fn stationary_point(&self) -> Option<f64> {
        if self.time == 0.0 {
            return None;
        }
        let p = self.distance / self.time;
        (p > 0.0).then_some(p)
    }

    /// Steepest-descent evaluation; see the module docs for the path.
    pub fn contour(&self, rel_tol: f64) -> Result<QuadratureResult<Complex64>> {
        let a = self.a();
        let a_abs = a.norm();
        let theta = 0.5 * a.arg();
        debug_assert!(theta.abs() < 0.5 * FRAC_PI_2 + 1e-12);
        let rot = Complex64::from_polar(1.0, -theta);
        let b_rot = self.b() * rot;
        let h = b_rot.im / (2.0 * a_abs);
        let u_c = b_rot.re / (2.0 * a_abs);

        let vertical = |v: f64| {
            let s = h * v * v;
            let p = rot * Complex64::new(0.0, s);
            self.integrand(p) * rot * Complex64::new(0.0, 2.0 * h * v)
        };
        let horizontal = |u: f64| {
            let p = rot * Complex64::new(u, h);
            self.integrand(p) * rot
        };

        // scale of the answer, used to set an absolute floor for the tolerance
        let width = (std::f64::consts::PI / a_abs).sqrt();
        let u_peak = u_c.max(0.0);
        let mut scale = horizontal(u_peak).norm() * width;
        for v in [0.25, 0.5, 0.75, 1.0] {
            scale = scale.max(vertical(v).norm());
        }
        let tol = Tolerance::new(1e-3 * rel_tol * scale.max(f64::MIN_POSITIVE), rel_tol);
        let engine = Integrator::new(tol).with_max_panels(20_000);

        let mut out = if h != 0.0 {
            engine.integrate(vertical, 0.0, 1.0)?
        } else {
            QuadratureResult { value: Complex64::new(0.0, 0.0), abs_error_estimate: 0.0, evaluations: 0 }
        };
        let reach = AMPLITUDE_REACH * 1.2 / a_abs.sqrt();
        let u_end = u_peak + reach;
        let mut pieces = vec![0.0];
        if u_c > 0.0 {
            pieces.push(u_c);
        }
        pieces.push(u_end);
        for w in pieces.windows(2) {
            let r = engine.integrate(horizontal, w[0], w[1])?;
            out.value += r.value;
            out.abs_error_estimate += r.abs_error_estimate;
            out.evaluations += r.evaluations;
        }
        Ok(out)
    }

    /// Direct real-axis quadrature, split at the stationary point.
    pub fn real_axis(&self, rel_tol: f64) -> Result<QuadratureResult<Complex64>> {
        let sigma = self.sigma_sq.sqrt();
        let p_max = self.p0.max(0.0) + AMPLITUDE_REACH / sigma;
        let f = |p: f64| self.integrand(Complex64::new(p, 0.0));
        let mut cuts = vec![0.0];
        if let Some(ps) = self.stationary_point().filter(|&ps| ps < p_max) {
            cuts.push(ps);
        }
        if self.p0 > 0.0 && self.p0 < p_max && !cuts.contains(&self.p0) {
            cuts.push(self.p0);
        }
        cuts.push(p_max);
        cuts.sort_by(f64::total_cmp);

        // pre-split so each chunk carries a bounded number of oscillations
        let phase_rate = |p: f64| (self.distance - p * self.time).abs();
        let mut edges = Vec::new();
        for w in cuts.windows(2) {
            let span = w[1] - w[0];
            let max_rate = phase_rate(w[0]).max(phase_rate(w[1]));
            let n = ((span * max_rate / (4.0 * std::f64::consts::PI)).ceil() as usize).clamp(1, 200_000);
            for k in 0..n {
                edges.push((w[0] + span * k as f64 / n as f64, w[0] + span * (k + 1) as f64 / n as f64));
            }
        }
        // crude bound on ∫|integrand| sets the absolute floor
        let scale = (std::f64::consts::PI / self.sigma_sq).sqrt() * (self.p0.max(0.0) + 1.0 / sigma).sqrt();
        let per_chunk = 1e-2 * rel_tol * scale / edges.len() as f64;
        let engine = Integrator::new(Tolerance::new(per_chunk, rel_tol)).with_max_panels(2_000);
        let mut out = QuadratureResult { value: Complex64::new(0.0, 0.0), abs_error_estimate: 0.0, evaluations: 0 };
        for (lo, hi) in edges {
            let r = engine.integrate(f, lo, hi)?;
            out.value += r.value;
            out.abs_error_estimate += r.abs_error_estimate;
            out.evaluations += r.evaluations;
        }
        Ok(out)
    }
}

/// Contour evaluation of the damped oscillatory integral with the given
/// amplitude (σ², p0) and phase (d, t).
pub fn integrate_damped_oscillatory(
    sigma_sq: f64,
    p0: f64,
    distance: f64,
    time: f64,
    rel_tol: f64,
) -> Result<QuadratureResult<Complex64>> {
    GaussianPhaseIntegral::new(sigma_sq, p0, distance, time)?.contour(rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint Riemann sum on a fine lattice; independent of both routes.
    fn brute_force(g: &GaussianPhaseIntegral, n: usize) -> Complex64 {
        let p_max = g.p0.max(0.0) + AMPLITUDE_REACH / g.sigma_sq.sqrt();
        let dp = p_max / n as f64;
        (0..n)
            .map(|k| g.integrand(Complex64::new((k as f64 + 0.5) * dp, 0.0)))
            .sum::<Complex64>()
            * dp
    }

    #[test]
    fn pure_fourier_case_matches_riemann_sum() {
        // t = 0: ∫ √p e^{-(p-1)²} e^{2ip} dp
        let g = GaussianPhaseIntegral::new(1.0, 1.0, 2.0, 0.0).unwrap();
        let c = g.contour(1e-11).unwrap().value;
        let r = g.real_axis(1e-11).unwrap().value;
        let bf = brute_force(&g, 4_000_000);
        assert!((c - bf).norm() < 1e-8, "{c} vs {bf}");
        assert!((r - bf).norm() < 1e-8, "{r} vs {bf}");
    }

    #[test]
    fn zero_phase_reduces_to_real_moment() {
        // ∫_0^∞ √p e^{-p²} dp = Γ(3/4)/2
        let g = GaussianPhaseIntegral::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let v = g.contour(1e-12).unwrap().value;
        let gamma_3_4 = 1.225_416_702_465_177_6;
        assert!((v.re - 0.5 * gamma_3_4).abs() < 1e-11, "{v}");
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn detector_at_origin_is_conjugate_symmetric_in_time() {
        let fwd = GaussianPhaseIntegral::new(1.0, 2.0, 0.0, 3.0).unwrap();
        let bwd = GaussianPhaseIntegral::new(1.0, 2.0, 0.0, -3.0).unwrap();
        let f = fwd.contour(1e-11).unwrap().value;
        let b = bwd.contour(1e-11).unwrap().value;
        assert!((f - b.conj()).norm() < 1e-10);
        let bf = brute_force(&fwd, 4_000_000);
        assert!((f.re - bf.re).abs() < 1e-8 && (f.im - bf.im).abs() < 1e-8, "{f} vs {bf}");
    }

    #[test]
    fn contour_matches_real_axis_across_regimes() {
        for &(s2, p0, d, t) in &[
            (1.0, 0.95, 30.0, 25.0),
            (0.5, 3.0, -4.0, 7.0),
            (2.0, -1.0, 5.0, -6.0),
            (1.0, 7.0, 10.0, 1.4),
            (0.25, 0.0, 0.0, 40.0),
            (1.0, 0.3, 60.0, -20.0),
        ] {
            let g = GaussianPhaseIntegral::new(s2, p0, d, t).unwrap();
            let c = g.contour(1e-11).unwrap().value;
            let r = g.real_axis(1e-11).unwrap().value;
            let scale = c.norm().max(1e-6);
            assert!((c - r).norm() / scale < 1e-8, "{:?}: {c} vs {r}", (s2, p0, d, t));
        }
    }

    #[test]
    fn late_time_follows_stationary_phase() {
        // |I|² ≈ (2π/t)·p*·|amp(p*)|² for large t
        let (s2, p0, d, t) = (1.0, 0.9466, 33_333.3, 35_000.0);
        let g = GaussianPhaseIntegral::new(s2, p0, d, t).unwrap();
        let v = g.contour(1e-10).unwrap();
        let ps = d / t;
        let approx = 2.0 * std::f64::consts::PI / t * ps * (-2.0 * s2 * (ps - p0) * (ps - p0)).exp();
        assert!((v.value.norm_sqr() / approx - 1.0).abs() < 1e-3);
        assert!(v.evaluations < 20_000, "{}", v.evaluations);
    }

    #[test]
    fn rejects_bad_width() {
        assert!(GaussianPhaseIntegral::new(0.0, 1.0, 1.0, 1.0).is_err());
    }
}

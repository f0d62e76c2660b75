//! Closed-form free evolution of Gaussian superpositions (ħ = m = 1).
//!
//! A term with weight c, centre x0, width σ and momentum p0 starts as
//!
//! ```text
//! ψ(x, 0) = c (2πσ²)^{-1/4} exp(−(x − x0)²/(4σ²) + i p0 (x − x0))
//! ```
//!
//! so σ is the standard deviation of |ψ|². With the complex width
//! `a(t) = σ² + i t/2` the evolved term is
//!
//! ```text
//! ψ(x, t) = c σ (2πσ²)^{-1/4} a^{-1/2} exp(−(y − p0 t)²/(4a) + i p0 y − i p0² t/2),  y = x − x0
//! ```
//!
//! and its momentum amplitude is `c σ√2 (2πσ²)^{-1/4} exp(−σ²(p − p0)² − i p x0)`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::quadrature::gauss_kronrod_panel;
use crate::numerics::{Integrator, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm {
    pub weight: Complex64,
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
}

impl GaussianTerm {
    pub fn new(weight: Complex64, center: f64, width: f64, momentum: f64) -> Self {
        Self { weight, center, width, momentum }
    }

    fn norm_factor(&self) -> f64 {
        (2.0 * PI * self.width * self.width).powf(-0.25)
    }

    /// Amplitude and ∂x amplitude at (x, t), excluding the weight.
    fn amplitude_and_slope(&self, x: f64, t: f64) -> (Complex64, Complex64) {
        let s2 = self.width * self.width;
        let a = Complex64::new(s2, 0.5 * t);
        let y = x - self.center;
        let p = self.momentum;
        // −(y − pt)²/4a + ipy − ip²t/2 over a common denominator: the O(p²t)
        // phases cancel analytically instead of in floating point
        let exponent = Complex64::new(-y * y, 2.0 * s2 * p * (2.0 * y - p * t)) / (4.0 * a);
        let psi = self.width * self.norm_factor() / a.sqrt() * exponent.exp();
        let slope = psi * Complex64::new(-y, 2.0 * s2 * p) / (2.0 * a);
        (psi, slope)
    }

    fn momentum_amplitude(&self, p: f64) -> Complex64 {
        let s2 = self.width * self.width;
        let dp = p - self.momentum;
        let amp = self.width * SQRT_2 * self.norm_factor() * (-s2 * dp * dp).exp();
        Complex64::from_polar(amp, -p * self.center)
    }

    /// σ(t) = σ·sqrt(1 + (t/2σ²)²).
    pub fn width_at(&self, t: f64) -> f64 {
        self.width * (1.0 + (t / (2.0 * self.width * self.width)).powi(2)).sqrt()
    }

    /// ⟨self|other⟩ and ⟨self|x|other⟩ at t = 0 (weights excluded).
    fn overlap_moments(&self, other: &GaussianTerm) -> (Complex64, Complex64) {
        let (xj, sj, pj) = (self.center, self.width, self.momentum);
        let (xk, sk, pk) = (other.center, other.width, other.momentum);
        let alpha = 1.0 / (4.0 * sj * sj) + 1.0 / (4.0 * sk * sk);
        let beta = Complex64::new(xj / (2.0 * sj * sj) + xk / (2.0 * sk * sk), pk - pj);
        let gamma = Complex64::new(-xj * xj / (4.0 * sj * sj) - xk * xk / (4.0 * sk * sk), pj * xj - pk * xk);
        let zeroth = self.norm_factor() * other.norm_factor() * (PI / alpha).sqrt() * (beta * beta / (4.0 * alpha) + gamma).exp();
        (zeroth, zeroth * beta / (2.0 * alpha))
    }
}

/// A normalized superposition of free Gaussians in dimensionless units.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketSpec {
    terms: Vec<GaussianTerm>,
}

impl PacketSpec {
    /// Normalizes the given terms so that ∫|ψ(x,0)|² dx = 1.
    pub fn new(terms: Vec<GaussianTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::domain("a packet needs at least one Gaussian term"));
        }
        for t in &terms {
            if !(t.width.is_finite() && t.width > 0.0) {
                return Err(Error::domain(format!("Gaussian width must be positive, got {}", t.width)));
            }
            if !(t.center.is_finite() && t.momentum.is_finite() && t.weight.re.is_finite() && t.weight.im.is_finite()) {
                return Err(Error::domain("Gaussian parameters must be finite"));
            }
        }
        let raw = Self { terms };
        let norm = raw.gram_sum(|j, k| j.overlap_moments(k).0).re;
        let scale = raw.terms.iter().map(|t| t.weight.norm_sqr()).sum::<f64>();
        if !(norm > 1e-24 * scale) {
            return Err(Error::domain(format!("superposition has vanishing norm ({norm:e})")));
        }
        let inv = 1.0 / norm.sqrt();
        let terms = raw.terms.into_iter().map(|t| GaussianTerm { weight: t.weight * inv, ..t }).collect();
        Ok(Self { terms })
    }

    pub fn gaussian(center: f64, width: f64, momentum: f64) -> Result<Self> {
        Self::new(vec![GaussianTerm::new(Complex64::new(1.0, 0.0), center, width, momentum)])
    }

    /// (ψ_σ(x − offset) − ψ_σ(x + offset)) at rest: odd about the origin, so
    /// its momentum amplitude vanishes at p = 0.
    pub fn odd_pair(offset: f64, width: f64) -> Result<Self> {
        Self::new(vec![
            GaussianTerm::new(Complex64::new(1.0, 0.0), offset, width, 0.0),
            GaussianTerm::new(Complex64::new(-1.0, 0.0), -offset, width, 0.0),
        ])
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    pub fn is_single_gaussian(&self) -> bool {
        self.terms.len() == 1
    }

    fn gram_sum<F: Fn(&GaussianTerm, &GaussianTerm) -> Complex64>(&self, f: F) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in &self.terms {
            for k in &self.terms {
                acc += j.weight.conj() * k.weight * f(j, k);
            }
        }
        acc
    }

    /// ⟨x⟩ at t = 0.
    pub fn centroid(&self) -> f64 {
        self.gram_sum(|j, k| j.overlap_moments(k).1).re
    }

    pub fn psi(&self, x: f64, t: f64) -> Complex64 {
        self.terms.iter().map(|term| term.weight * term.amplitude_and_slope(x, t).0).sum()
    }

    /// (ψ, ∂xψ) from the closed-form derivative.
    pub fn psi_with_slope(&self, x: f64, t: f64) -> (Complex64, Complex64) {
        self.terms.iter().fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |(v, d), term| {
            let (a, s) = term.amplitude_and_slope(x, t);
            (v + term.weight * a, d + term.weight * s)
        })
    }

    pub fn density(&self, x: f64, t: f64) -> f64 {
        self.psi(x, t).norm_sqr()
    }

    /// Probability current Im(ψ* ∂xψ).
    pub fn flux(&self, x: f64, t: f64) -> f64 {
        let (psi, slope) = self.psi_with_slope(x, t);
        (psi.conj() * slope).im
    }

    /// φ̃(p), the momentum amplitude of the initial state.
    pub fn psi_momentum(&self, p: f64) -> Complex64 {
        self.terms.iter().map(|term| term.weight * term.momentum_amplitude(p)).sum()
    }

    /// φ̃(p) e^{−ip²t/2}.
    pub fn psi_momentum_at(&self, p: f64, t: f64) -> Complex64 {
        self.psi_momentum(p) * Complex64::from_polar(1.0, -0.5 * p * p * t)
    }

    /// |φ̃(0)|², the coefficient of the 1/|t| tail of |ψ(x, t)|².
    pub fn momentum_density_at_zero(&self) -> f64 {
        self.psi_momentum(0.0).norm_sqr()
    }

    /// Probability carried by momenta of the given sign (∫_0^∞ or ∫_{-∞}^0 of |φ̃|²).
    pub fn momentum_mass(&self, positive: bool) -> Result<f64> {
        if let [term] = self.terms.as_slice() {
            // |φ̃|² is a normal density with mean p0 and variance 1/(4σ²)
            let z = SQRT_2 * term.width * term.momentum;
            let w = term.weight.norm_sqr();
            return Ok(if positive { 0.5 * w * libm::erfc(-z) } else { 0.5 * w * libm::erfc(z) });
        }
        let (lo, hi) = self.momentum_support();
        let f = |p: f64| self.psi_momentum(p).norm_sqr();
        let engine = Integrator::new(Tolerance::new(1e-14, 1e-12));
        let r = if positive { engine.integrate(f, 0.0, hi.max(1.0))? } else { engine.integrate(f, lo.min(-1.0), 0.0)? };
        Ok(r.value)
    }

    /// Momentum interval outside which |φ̃|² is below e^{-100} of its scale.
    pub fn momentum_support(&self) -> (f64, f64) {
        self.terms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
            let reach = 7.1 / t.width;
            (lo.min(t.momentum - reach), hi.max(t.momentum + reach))
        })
    }

    /// Position interval that holds all but ~e^{-100} of the probability at time t.
    pub fn position_support(&self, t: f64) -> (f64, f64) {
        self.terms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), term| {
            let reach = 14.2 * term.width_at(t);
            let c = term.center + term.momentum * t;
            (lo.min(c - reach), hi.max(c + reach))
        })
    }

    /// ∫_a^b |ψ(x,t)|² dx; closed form for single Gaussians, quadrature otherwise.
    pub fn interval_mass(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        if let [term] = self.terms.as_slice() {
            let mean = term.center + term.momentum * t;
            let s = SQRT_2 * term.width_at(t);
            let half = 0.5 * (b - a) / s;
            if half < 0.5 {
                // narrow slice of a wide packet: ½[erf(z_b) − erf(z_a)] would cancel, so
                // integrate around the midpoint with the half-width computed directly
                let zc = (0.5 * (a + b) - mean) / s;
                let f = |v: f64| (-(zc + half * v).powi(2)).exp();
                return Ok(term.weight.norm_sqr() * half * gauss_kronrod_panel(&f, -1.0, 1.0).0 / PI.sqrt());
            }
            return Ok(term.weight.norm_sqr() * normal_mass((a - mean) / s, (b - mean) / s));
        }
        let (lo, hi) = self.position_support(t);
        let (a2, b2) = (a.max(lo), b.min(hi));
        if a2 >= b2 {
            return Ok(0.0);
        }
        let r = Integrator::new(Tolerance::new(1e-15, 1e-12)).integrate(|x| self.density(x, t), a2, b2)?;
        Ok(r.value)
    }

    /// ∫|ψ(x,t)|² dx by quadrature over the position support.
    pub fn position_norm(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.position_support(t);
        Ok(Integrator::new(Tolerance::new(1e-13, 1e-12)).integrate(|x| self.density(x, t), lo, hi)?.value)
    }

    /// ∫|φ̃(p)|² dp by quadrature over the momentum support.
    pub fn momentum_norm(&self) -> Result<f64> {
        let (lo, hi) = self.momentum_support();
        Ok(Integrator::new(Tolerance::new(1e-14, 1e-13))
            .integrate(|p| self.psi_momentum(p).norm_sqr(), lo, hi)?
            .value)
    }

    /// (x0, σ, p0) of each term, for sizing reference grids.
    pub fn components(&self) -> Vec<(f64, f64, f64)> {
        self.terms.iter().map(|t| (t.center, t.width, t.momentum)).collect()
    }
}

/// ½[erf(z_b) − erf(z_a)] evaluated without cancellation in the tails.
fn normal_mass(z_a: f64, z_b: f64) -> f64 {
    if z_a >= 0.0 {
        0.5 * (libm::erfc(z_a) - libm::erfc(z_b))
    } else if z_b <= 0.0 {
        0.5 * (libm::erfc(-z_b) - libm::erfc(-z_a))
    } else {
        0.5 * (libm::erf(z_b) - libm::erf(z_a))
    }
}

/// Where arrivals are registered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detector {
    Point { x: f64 },
    Interval { a: f64, b: f64 },
}

impl Detector {
    pub fn point(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::domain("detector position must be finite"));
        }
        Ok(Detector::Point { x })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::domain(format!("detector interval needs finite a < b, got [{a}, {b}]")));
        }
        Ok(Detector::Interval { a, b })
    }

    /// [−ΔL/2, ΔL/2].
    pub fn centered(length: f64) -> Result<Self> {
        Self::interval(-0.5 * length, 0.5 * length)
    }

    pub fn center(&self) -> f64 {
        match *self {
            Detector::Point { x } => x,
            Detector::Interval { a, b } => 0.5 * (a + b),
        }
    }

    /// ΔL for intervals; `None` for points.
    pub fn length(&self) -> Option<f64> {
        match *self {
            Detector::Point { .. } => None,
            Detector::Interval { a, b } => Some(b - a),
        }
    }

    /// Detection-region mass at time t: |ψ(x_d,t)|² (per unit length) for a
    /// point, ∫_D |ψ|² for an interval.
    pub fn region_density(&self, spec: &PacketSpec, t: f64) -> Result<f64> {
        match *self {
            Detector::Point { x } => Ok(spec.density(x, t)),
            Detector::Interval { a, b } => spec.interval_mass(a, b, t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn three_term() -> PacketSpec {
        PacketSpec::new(vec![
            GaussianTerm::new(Complex64::new(1.0, 0.0), -2.0, 0.7, 1.5),
            GaussianTerm::new(Complex64::new(0.3, -0.4), 1.0, 1.3, -0.5),
            GaussianTerm::new(Complex64::new(-0.2, 0.1), 4.0, 0.9, 2.5),
        ])
        .unwrap()
    }

    #[test]
    fn peak_density_of_normalized_gaussian() {
        let spec = PacketSpec::gaussian(-3.0, 1.7, 0.4).unwrap();
        let expected = 1.0 / (2.0 * PI * 1.7 * 1.7).sqrt();
        assert!((spec.density(-3.0, 0.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn calcium_packet_spreading_at_transit_time() {
        // 1 mm at 5 cm/s with σ0 = 30 nm; lengths in units of σ0
        let units = crate::units::UnitSystem::new(6.655e-26, 30e-9).unwrap();
        let x0 = -units.length_to_dimensionless(1e-3);
        let p0 = units.momentum_from_velocity(0.05);
        let spec = PacketSpec::gaussian(x0, 1.0, p0).unwrap();
        let t = units.time_to_dimensionless(0.02);
        // second moment by quadrature, independent of the width formula
        let mean = x0 + p0 * t;
        let (lo, hi) = spec.position_support(t);
        let var = Integrator::new(Tolerance::new(1e-6, 1e-12))
            .integrate(|x| (x - mean).powi(2) * spec.density(x, t), lo, hi)
            .unwrap()
            .value;
        let width_mm = units.length_to_si(var.sqrt()) * 1e3;
        assert!((width_mm - 0.528).abs() < 0.002, "{width_mm}");
        assert!((var.sqrt() / 1.76e4 - 1.0).abs() < 0.01);
        assert!((spec.terms()[0].width_at(t) - var.sqrt()).abs() / var.sqrt() < 1e-8);
    }

    #[test]
    fn flux_at_initial_peak_is_density_times_velocity() {
        let spec = PacketSpec::gaussian(2.0, 0.8, 3.0).unwrap();
        let expected = 3.0 / (2.0 * PI * 0.64f64).sqrt();
        assert!((spec.flux(2.0, 0.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn resting_packet_has_no_current_at_centre() {
        let spec = PacketSpec::gaussian(1.5, 1.0, 0.0).unwrap();
        for t in [0.0, 0.3, 7.0, -12.0, 1e4] {
            assert!(spec.flux(1.5, t).abs() < 1e-18);
        }
    }

    #[test]
    fn fast_packet_momentum_ratio() {
        let spec = PacketSpec::gaussian(-10.0, 1.0, 7.0).unwrap();
        let ratio = spec.psi_momentum(0.0).norm_sqr() / spec.psi_momentum(7.0).norm_sqr();
        assert!((ratio.ln() + 98.0).abs() < 1e-9, "{}", ratio.ln());
    }

    #[test]
    fn odd_pair_has_no_zero_momentum_component() {
        let spec = PacketSpec::odd_pair(2.0, 1.0).unwrap();
        assert_eq!(spec.psi_momentum(0.0), Complex64::new(0.0, 0.0));
        assert_eq!(spec.momentum_density_at_zero(), 0.0);
        assert!(spec.psi(0.0, 3.0).norm() < 1e-16);
    }

    #[test]
    fn momentum_mass_closed_form_matches_quadrature() {
        let spec = PacketSpec::gaussian(0.0, 1.0, 0.9466).unwrap();
        let closed = spec.momentum_mass(true).unwrap();
        let quad = Integrator::default().integrate(|p| spec.psi_momentum(p).norm_sqr(), 0.0, 12.0).unwrap().value;
        assert!((closed - quad).abs() < 1e-12);
        assert!((closed + spec.momentum_mass(false).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn centroid_of_superposition_matches_quadrature() {
        let spec = three_term();
        let (lo, hi) = spec.position_support(0.0);
        let quad = Integrator::new(Tolerance::new(1e-13, 1e-12))
            .integrate(|x| x * spec.density(x, 0.0), lo, hi)
            .unwrap()
            .value;
        assert!((spec.centroid() - quad).abs() < 1e-10);
    }

    #[test]
    fn narrow_interval_of_wide_packet_keeps_precision() {
        let spec = PacketSpec::gaussian(-5.0, 1.5, 0.3).unwrap();
        for t in [1e5, 1e7] {
            let m = spec.interval_mass(-0.5, 0.5, t).unwrap();
            // ρ is linear across the slice up to O((ΔL/σ_t)²)
            let mid = spec.density(0.0, t);
            assert!((m - mid).abs() / mid < 1e-9, "{m} vs {mid}");
        }
        // smooth in t at the 1e-14 level
        let g = |t: f64| spec.interval_mass(-0.5, 0.5, t).unwrap() * t;
        let (t0, h) = (4e5, 1.0);
        let second = g(t0 + h) - 2.0 * g(t0) + g(t0 - h);
        assert!(second.abs() < 1e-13, "{second:e}");
    }

    #[test]
    fn interval_mass_single_vs_quadrature() {
        let spec = PacketSpec::gaussian(-4.0, 1.2, 2.0).unwrap();
        for t in [0.0, 1.0, 2.0, 5.0, 40.0, -3.0] {
            let closed = spec.interval_mass(-0.5, 0.5, t).unwrap();
            let quad = Integrator::new(Tolerance::new(1e-16, 1e-13)).integrate(|x| spec.density(x, t), -0.5, 0.5).unwrap().value;
            assert!((closed - quad).abs() < 1e-13, "t={t}: {closed} vs {quad}");
        }
    }

    #[test]
    fn rejects_empty_or_degenerate() {
        assert!(PacketSpec::new(vec![]).is_err());
        assert!(PacketSpec::gaussian(0.0, 0.0, 1.0).is_err());
        let cancel = vec![
            GaussianTerm::new(Complex64::new(1.0, 0.0), 0.0, 1.0, 0.0),
            GaussianTerm::new(Complex64::new(-1.0, 0.0), 0.0, 1.0, 0.0),
        ];
        assert!(PacketSpec::new(cancel).is_err());
        assert!(Detector::interval(1.0, 1.0).is_err());
        assert!(Detector::point(f64::NAN).is_err());
    }

    fn arb_spec() -> impl Strategy<Value = PacketSpec> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -6.0f64..6.0, 0.4f64..2.0, -3.0f64..3.0), 1..4).prop_filter_map(
            "degenerate",
            |raw| {
                let terms = raw
                    .into_iter()
                    .map(|(wr, wi, x0, s, p0)| GaussianTerm::new(Complex64::new(wr + 1.1, wi), x0, s, p0))
                    .collect();
                PacketSpec::new(terms).ok()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn unitarity(spec in arb_spec(), t in -40.0f64..40.0) {
            let n = spec.position_norm(t).unwrap();
            prop_assert!((n - 1.0).abs() < 1e-8, "norm {}", n);
        }

        #[test]
        fn parseval(spec in arb_spec()) {
            let x = spec.position_norm(0.0).unwrap();
            let p = spec.momentum_norm().unwrap();
            prop_assert!((x - p).abs() < 1e-10, "{} vs {}", x, p);
        }

        #[test]
        fn continuity_equation(spec in arb_spec(), x in -8.0f64..8.0, t in 0.1f64..20.0) {
            let h = 1e-4;
            let drho_dt = (spec.density(x, t + h) - spec.density(x, t - h)) / (2.0 * h);
            let dj_dx = (spec.flux(x + h, t) - spec.flux(x - h, t)) / (2.0 * h);
            let scale = dj_dx.abs().max(drho_dt.abs()).max(1e-6);
            prop_assert!((drho_dt + dj_dx).abs() / scale < 1e-6, "{} vs {}", drho_dt, dj_dx);
        }
    }
}

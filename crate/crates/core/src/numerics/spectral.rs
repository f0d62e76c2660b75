//! Exact free evolution on a periodic grid.
//!
//! The free Hamiltonian is diagonal in momentum, so one forward FFT, one
//! multiplication by e^{−ip²t/2} and one inverse FFT evolve the sampled state
//! over any interval with no splitting error. This module deliberately knows
//! nothing about wave-packet closed forms; it is the independent reference the
//! analytic code is checked against.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Largest boundary/peak amplitude ratio accepted on input.
pub const INPUT_BOUNDARY_RATIO: f64 = 1e-8;
/// Largest boundary/peak amplitude ratio tolerated after a step.
pub const OUTPUT_BOUNDARY_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    x_min: f64,
    x_max: f64,
    amplitudes: Vec<Complex64>,
}

impl GridState {
    /// Wraps samples taken at `x_min + j·dx`, `dx = (x_max − x_min)/n`.
    pub fn new(x_min: f64, x_max: f64, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.len();
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::domain(format!("grid size must be a power of two, got {n}")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::domain(format!("invalid grid extent [{x_min}, {x_max}]")));
        }
        let state = Self { x_min, x_max, amplitudes };
        let norm = state.norm();
        if norm > 1.0 + 1e-9 {
            return Err(Error::domain(format!("grid probability {norm} exceeds 1")));
        }
        let ratio = state.boundary_ratio();
        if ratio > INPUT_BOUNDARY_RATIO {
            return Err(Error::Aliasing { ratio, limit: INPUT_BOUNDARY_RATIO });
        }
        Ok(state)
    }

    pub fn sample<F: Fn(f64) -> Complex64>(x_min: f64, x_max: f64, n: usize, f: F) -> Result<Self> {
        let dx = (x_max - x_min) / n as f64;
        let amplitudes = (0..n).map(|j| f(x_min + j as f64 * dx)).collect();
        Self::new(x_min, x_max, amplitudes)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.len() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Σ |ψ_j|² dx.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dx()
    }

    /// Largest |ψ| within 1/64 of the grid of either edge, relative to the peak.
    pub fn boundary_ratio(&self) -> f64 {
        let n = self.len();
        let peak = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let edge = (n / 64).max(1);
        let head = self.amplitudes[..edge].iter();
        let tail = self.amplitudes[n - edge..].iter();
        head.chain(tail).map(|a| a.norm()).fold(0.0, f64::max) / peak
    }

    /// Momentum of FFT bin k on the discrete lattice.
    pub fn momentum(&self, k: usize) -> f64 {
        let n = self.len();
        let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        2.0 * PI * signed / (n as f64 * self.dx())
    }
}

/// Evolves `g` freely for time `t` (ħ = m = 1).
pub fn propagate_spectral(g: &GridState, t: f64) -> Result<GridState> {
    if !t.is_finite() {
        return Err(Error::domain("propagation time must be finite"));
    }
    let n = g.len();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut buf = g.amplitudes.clone();
    forward.process(&mut buf);
    let inv_n = 1.0 / n as f64;
    for (k, c) in buf.iter_mut().enumerate() {
        let p = g.momentum(k);
        *c *= Complex64::from_polar(inv_n, -0.5 * p * p * t);
    }
    inverse.process(&mut buf);
    let out = GridState { x_min: g.x_min, x_max: g.x_max, amplitudes: buf };
    let ratio = out.boundary_ratio();
    if ratio > OUTPUT_BOUNDARY_RATIO {
        return Err(Error::Aliasing { ratio, limit: OUTPUT_BOUNDARY_RATIO });
    }
    Ok(out)
}

/// Grid extent and size for a set of Gaussian components `(x0, σ, p0)`
/// evolved up to `t_max`: the span covers every component at t = 0 and
/// t_max by at least 12 final widths (6 each side), and the momentum lattice
/// reaches |p0| + 8/σ for every component.
pub fn plan_grid(components: &[(f64, f64, f64)], t_max: f64) -> (f64, f64, usize) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut p_cover: f64 = 0.0;
    for &(x0, sigma, p0) in components {
        let spread = sigma * (1.0 + (t_max / (2.0 * sigma * sigma)).powi(2)).sqrt();
        let margin = 12.0 * spread;
        for centre in [x0, x0 + p0 * t_max] {
            lo = lo.min(centre - margin);
            hi = hi.max(centre + margin);
        }
        p_cover = p_cover.max(p0.abs() + 8.0 / sigma);
    }
    let span = hi - lo;
    // dx ≤ π / p_cover keeps the lattice wide enough
    let needed = (span * p_cover / PI).ceil() as usize;
    let n = needed.max(64).next_power_of_two();
    (lo, hi, n)
}

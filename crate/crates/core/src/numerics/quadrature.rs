//! Globally adaptive Gauss–Kronrod (G7/K15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] (paired) and XGK[7] (centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values the integrator can accumulate: real or complex.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub fn abs(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub fn rel(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    fn halved(self) -> Self {
        Self { abs: 0.5 * self.abs, rel: self.rel }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<V> {
    pub value: V,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl<V: QuadValue> QuadratureResult<V> {
    fn zero() -> Self {
        Self { value: V::default(), abs_error_estimate: 0.0, evaluations: 0 }
    }

    fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

/// One K15 panel; returns the Kronrod value and |K15 − G7|.
pub fn gauss_kronrod_panel<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> (V, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * w;
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    (k, (k - g).magnitude())
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl<V> Eq for Panel<V> {}

impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integration engine. Cheap to construct; holds only limits.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub tol: Tolerance,
    pub max_panels: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self { tol: Tolerance::default(), max_panels: 4000 }
    }
}

impl Integrator {
    pub fn new(tol: Tolerance) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    /// ∫_a^b f. Either bound may be infinite; half-infinite ranges use t = 1/u.
    pub fn integrate<V: QuadValue, F: Fn(f64) -> V>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult<V>> {
        self.range(&f, a, b)
    }

    fn range<V: QuadValue>(&self, f: &dyn Fn(f64) -> V, a: f64, b: f64) -> Result<QuadratureResult<V>> {
        if a.is_nan() || b.is_nan() {
            return Err(Error::domain("integration bound is NaN"));
        }
        if a == b {
            return Ok(QuadratureResult::zero());
        }
        if a > b {
            return self.range(f, b, a).map(|r| r.scaled(-1.0));
        }
        match (a.is_finite(), b.is_finite()) {
            (true, true) => self.finite(&f, a, b),
            (true, false) => self.to_infinity(&f, a, a.abs().max(1.0) + a.max(0.0)),
            (false, true) => {
                let g = |t: f64| f(-t);
                self.to_infinity(&g, -b, b.abs().max(1.0) - b.min(0.0))
            }
            (false, false) => {
                let half = Integrator { tol: self.tol.halved(), ..*self };
                let right = half.range(f, 0.0, f64::INFINITY)?;
                let left = half.range(f, f64::NEG_INFINITY, 0.0)?;
                Ok(left.combine(right))
            }
        }
    }

    /// ∫_a^∞ f, split at `knee` (> a, > 0); the part beyond the knee is mapped
    /// to u = 1/t on (0, 1/knee].
    pub fn to_infinity<V: QuadValue, F: Fn(f64) -> V>(
        &self,
        f: &F,
        a: f64,
        knee: f64,
    ) -> Result<QuadratureResult<V>> {
        let half = Integrator { tol: self.tol.halved(), ..*self };
        if a > 0.0 && knee <= a {
            let g = |u: f64| f(1.0 / u) * (1.0 / (u * u));
            return self.finite(&g, 0.0, 1.0 / a);
        }
        if knee <= 0.0 || knee <= a {
            return Err(Error::domain(format!("knee {knee} must exceed both 0 and the lower bound {a}")));
        }
        let head = half.finite(f, a, knee)?;
        let g = |u: f64| f(1.0 / u) * (1.0 / (u * u));
        let tail = half.finite(&g, 0.0, 1.0 / knee)?;
        Ok(head.combine(tail))
    }

    /// ∫_a^b f for 0 < a < b via t = e^s; suited to integrands with 1/t tails.
    pub fn log_scale<V: QuadValue, F: Fn(f64) -> V>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult<V>> {
        if !(a > 0.0 && b >= a) {
            return Err(Error::domain(format!("log-scale integration needs 0 < a <= b, got [{a}, {b}]")));
        }
        let g = |s: f64| {
            let t = s.exp();
            f(t) * t
        };
        self.finite(&g, a.ln(), b.ln())
    }

    fn finite<V: QuadValue, F: Fn(f64) -> V>(&self, f: &F, a: f64, b: f64) -> Result<QuadratureResult<V>> {
        let (value, error) = gauss_kronrod_panel(f, a, b);
        let mut evaluations = 15;
        if !value.is_finite_value() {
            return Err(Error::domain(format!("integrand is not finite on [{a}, {b}]")));
        }
        let mut total = value;
        let mut total_err = error;
        let mut heap = BinaryHeap::new();
        heap.push(Panel { a, b, value, error });
        let mut stuck_err = 0.0;

        while total_err > self.tol.target(total.magnitude()) {
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            let too_narrow = mid <= worst.a
                || mid >= worst.b
                || (worst.b - worst.a) <= 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
            if heap.len() + 2 > self.max_panels || too_narrow {
                if too_narrow && heap.len() + 2 <= self.max_panels {
                    // cannot refine further; keep its contribution and move on
                    stuck_err += worst.error;
                    if stuck_err > self.tol.target(total.magnitude()) {
                        return Err(non_convergence(a, b, &worst, evaluations));
                    }
                    continue;
                }
                return Err(non_convergence(a, b, &worst, evaluations));
            }
            let (lv, le) = gauss_kronrod_panel(f, worst.a, mid);
            let (rv, re) = gauss_kronrod_panel(f, mid, worst.b);
            evaluations += 30;
            if !(lv.is_finite_value() && rv.is_finite_value()) {
                return Err(Error::domain(format!("integrand is not finite on [{}, {}]", worst.a, worst.b)));
            }
            total = total - worst.value + lv + rv;
            total_err = total_err - worst.error + le + re;
            heap.push(Panel { a: worst.a, b: mid, value: lv, error: le });
            heap.push(Panel { a: mid, b: worst.b, value: rv, error: re });
        }

        // re-sum to shed the drift of incremental updates
        let mut value = V::default();
        let mut err = stuck_err;
        for p in heap.iter() {
            value = value + p.value;
            err += p.error;
        }
        Ok(QuadratureResult { value, abs_error_estimate: err, evaluations })
    }
}

fn non_convergence<V>(a: f64, b: f64, worst: &Panel<V>, evaluations: usize) -> Error {
    Error::NonConvergence {
        a,
        b,
        worst_a: worst.a,
        worst_b: worst.b,
        estimate: worst.error,
        evaluations,
    }
}

/// ∫_a^b f to the given absolute tolerance with default panel limits.
pub fn integrate_adaptive<V: QuadValue, F: Fn(f64) -> V>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult<V>> {
    Integrator::new(Tolerance::new(tol, 0.0)).integrate(f, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_weights_integrate_constants() {
        let s: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_adaptive(|x: f64| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.abs_error_estimate >= 0.0 && r.evaluations > 0);
    }

    #[test]
    fn exponential_tail_transform() {
        let r = integrate_adaptive(|t: f64| (-t).exp(), 0.0, f64::INFINITY, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn whole_line_gaussian() {
        let r = integrate_adaptive(|x: f64| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, 1e-13).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let r = integrate_adaptive(|x: f64| x.cos(), 1.0, 0.0, 1e-13).unwrap();
        assert!((r.value + 1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn complex_integrand() {
        let r = integrate_adaptive(|x: f64| Complex64::new(0.0, x).exp(), 0.0, PI, 1e-13).unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn log_scale_reciprocal() {
        let r = Integrator::new(Tolerance::new(1e-13, 1e-13))
            .log_scale(|t: f64| 1.0 / t, 1.0, 1e8)
            .unwrap();
        assert!((r.value - 1e8f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn non_convergence_reports_worst_panel() {
        let err = Integrator::new(Tolerance::abs(1e-14))
            .with_max_panels(8)
            .integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0)
            .unwrap_err();
        match err {
            Error::NonConvergence { worst_a, worst_b, estimate, .. } => {
                assert!(worst_a < worst_b);
                assert!(estimate > 0.0);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn nan_integrand_is_a_domain_error() {
        let err = integrate_adaptive(|_x: f64| f64::NAN, 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }
}

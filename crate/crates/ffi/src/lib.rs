//! C ABI over `toa-core`.
//!
//! Objects are opaque handles created by `toa_*_new` style functions and
//! released with the matching `toa_*_free`. Every fallible call returns a
//! [`ToaStatus`]; on failure a message is kept per thread and can be read with
//! [`toa_last_error_message`]. Results are written through out-pointers, which
//! are left untouched on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use toa_core::distributions::{point_distribution, ArrivalDistribution, QcWindow, QuantumClock};
use toa_core::{Detector, Error, GaussianTerm, Kind, PacketSpec, UnitSystem};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToaStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad argument or configuration (invalid widths, windows, detectors...).
    InvalidArgument = 2,
    NonConvergence = 3,
    DegenerateNormalization = 4,
    Aliasing = 5,
    FitFailed = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToaKind {
    Kijowski = 0,
    Flux = 1,
    SemiClassical = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToaWindow {
    /// [−T/2, T/2]
    Symmetric = 0,
    /// [0, T]
    Forward = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToaDetectorKind {
    Point = 0,
    Interval = 1,
}

/// A point at `a` (b ignored) or the interval [a, b].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ToaDetector {
    pub kind: ToaDetectorKind,
    pub a: f64,
    pub b: f64,
}

/// SI values of the natural units ħ = m = 1, length σ0.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ToaUnitScales {
    pub length_m: f64,
    pub time_s: f64,
    pub velocity_m_s: f64,
    pub momentum_kg_m_s: f64,
}

/// A normalized superposition of Gaussian wave packets.
pub struct ToaPacket(PacketSpec);

/// A K, F or SC arrival-time density at a point detector.
pub struct ToaDistribution(Box<dyn ArrivalDistribution>);

/// The windowed quantum-clock density for one packet and detector.
pub struct ToaClock(QuantumClock);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ToaStatus {
    match e {
        Error::NonConvergence { .. } => ToaStatus::NonConvergence,
        Error::DegenerateNormalization { .. } => ToaStatus::DegenerateNormalization,
        Error::Aliasing { .. } => ToaStatus::Aliasing,
        Error::Fit(_) => ToaStatus::FitFailed,
        _ => ToaStatus::InvalidArgument,
    }
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard<F: FnOnce() -> Result<(), (ToaStatus, String)>>(f: F) -> ToaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            ToaStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ToaStatus::Panic
        }
    }
}

fn core<T>(r: toa_core::Result<T>) -> Result<T, (ToaStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (ToaStatus, String) {
    (ToaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (ToaStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (ToaStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], (ToaStatus, String)> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn write_slice(out: *mut f64, values: &[f64]) -> Result<(), (ToaStatus, String)> {
    if values.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null("output array"));
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread ("" after a success).
/// Valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn toa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn toa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn toa_unit_scales(mass_kg: f64, sigma0_m: f64, out: *mut ToaUnitScales) -> ToaStatus {
    guard(|| {
        let u = core(UnitSystem::new(mass_kg, sigma0_m))?;
        write(
            out,
            ToaUnitScales {
                length_m: u.length_unit_si(),
                time_s: u.time_unit_si(),
                velocity_m_s: u.velocity_unit_si(),
                momentum_kg_m_s: u.momentum_unit_si(),
            },
        )
    })
}

/// Single Gaussian (dimensionless centre, width, mean momentum).
///
/// # Safety
/// `out` must be valid for writes; the handle must be released with
/// [`toa_packet_free`].
#[no_mangle]
pub unsafe extern "C" fn toa_packet_gaussian(center: f64, width: f64, momentum: f64, out: *mut *mut ToaPacket) -> ToaStatus {
    guard(|| {
        let spec = core(PacketSpec::gaussian(center, width, momentum))?;
        write(out, boxed(ToaPacket(spec)))
    })
}

/// Odd state ψ(x − offset) − ψ(x + offset) at rest.
///
/// # Safety
/// As [`toa_packet_gaussian`].
#[no_mangle]
pub unsafe extern "C" fn toa_packet_odd_pair(offset: f64, width: f64, out: *mut *mut ToaPacket) -> ToaStatus {
    guard(|| {
        let spec = core(PacketSpec::odd_pair(offset, width))?;
        write(out, boxed(ToaPacket(spec)))
    })
}

/// Normalized superposition of `n` Gaussian terms.
///
/// # Safety
/// Each array must hold `n` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn toa_packet_superposition(
    n: usize,
    weights_re: *const f64,
    weights_im: *const f64,
    centers: *const f64,
    widths: *const f64,
    momenta: *const f64,
    out: *mut *mut ToaPacket,
) -> ToaStatus {
    guard(|| {
        let re = slice(weights_re, n, "weights_re")?;
        let im = slice(weights_im, n, "weights_im")?;
        let c = slice(centers, n, "centers")?;
        let w = slice(widths, n, "widths")?;
        let p = slice(momenta, n, "momenta")?;
        let terms = (0..n).map(|i| GaussianTerm::new(Complex64::new(re[i], im[i]), c[i], w[i], p[i])).collect();
        let spec = core(PacketSpec::new(terms))?;
        write(out, boxed(ToaPacket(spec)))
    })
}

/// # Safety
/// `packet` must come from a `toa_packet_*` constructor (or be null) and is
/// invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn toa_packet_free(packet: *mut ToaPacket) {
    if !packet.is_null() {
        drop(Box::from_raw(packet));
    }
}

/// |ψ(x, t)|².
///
/// # Safety
/// `packet` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn toa_packet_density(packet: *const ToaPacket, x: f64, t: f64, out: *mut f64) -> ToaStatus {
    guard(|| write(out, deref(packet, "packet")?.0.density(x, t)))
}

/// Probability current J(x, t).
///
/// # Safety
/// As [`toa_packet_density`].
#[no_mangle]
pub unsafe extern "C" fn toa_packet_flux(packet: *const ToaPacket, x: f64, t: f64, out: *mut f64) -> ToaStatus {
    guard(|| write(out, deref(packet, "packet")?.0.flux(x, t)))
}

/// |φ̃(0)|², the coefficient of the ln T growth of the clock normalization.
///
/// # Safety
/// As [`toa_packet_density`].
#[no_mangle]
pub unsafe extern "C" fn toa_packet_momentum_density_at_zero(packet: *const ToaPacket, out: *mut f64) -> ToaStatus {
    guard(|| write(out, deref(packet, "packet")?.0.momentum_density_at_zero()))
}

/// K, F or SC density for a point detector at `x_d`.
///
/// # Safety
/// `packet` must be a live handle; `out` valid for writes. Release the
/// result with [`toa_distribution_free`].
#[no_mangle]
pub unsafe extern "C" fn toa_distribution_new(
    packet: *const ToaPacket,
    kind: ToaKind,
    x_d: f64,
    out: *mut *mut ToaDistribution,
) -> ToaStatus {
    guard(|| {
        let spec = &deref(packet, "packet")?.0;
        let kind = match kind {
            ToaKind::Kijowski => Kind::Kijowski,
            ToaKind::Flux => Kind::Flux,
            ToaKind::SemiClassical => Kind::SemiClassical,
        };
        let dist = core(point_distribution(kind, spec, x_d))?;
        write(out, boxed(ToaDistribution(dist)))
    })
}

/// # Safety
/// `dist` must come from [`toa_distribution_new`] (or be null).
#[no_mangle]
pub unsafe extern "C" fn toa_distribution_free(dist: *mut ToaDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Normalized density at each of `n` times.
///
/// # Safety
/// `times` and `out` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn toa_distribution_density(
    dist: *const ToaDistribution,
    times: *const f64,
    n: usize,
    out: *mut f64,
) -> ToaStatus {
    guard(|| {
        let d = &deref(dist, "distribution")?.0;
        let values = core(slice(times, n, "times")?.iter().map(|&t| d.density(t)).collect::<toa_core::Result<Vec<f64>>>())?;
        write_slice(out, &values)
    })
}

/// Probability mass before normalization.
///
/// # Safety
/// `dist` live, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn toa_distribution_raw_norm(dist: *const ToaDistribution, out: *mut f64) -> ToaStatus {
    guard(|| write(out, deref(dist, "distribution")?.0.raw_norm()))
}

/// Non-arrival probability ∫_T^∞ Π for nondecreasing cutoffs T.
///
/// # Safety
/// `cutoffs` and `out` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn toa_distribution_nonarrival(
    dist: *const ToaDistribution,
    cutoffs: *const f64,
    n: usize,
    out: *mut f64,
) -> ToaStatus {
    guard(|| {
        let d = &deref(dist, "distribution")?.0;
        let values = core(toa_core::distributions::nonarrival_curve(d.as_ref(), slice(cutoffs, n, "cutoffs")?))?;
        write_slice(out, &values)
    })
}

/// Quantum-clock density for a packet, detector and window placement.
///
/// # Safety
/// `packet` live, `out` valid for writes. Release with [`toa_clock_free`].
#[no_mangle]
pub unsafe extern "C" fn toa_clock_new(
    packet: *const ToaPacket,
    detector: ToaDetector,
    window: ToaWindow,
    out: *mut *mut ToaClock,
) -> ToaStatus {
    guard(|| {
        let spec = &deref(packet, "packet")?.0;
        let det = core(match detector.kind {
            ToaDetectorKind::Point => Detector::point(detector.a),
            ToaDetectorKind::Interval => Detector::interval(detector.a, detector.b),
        })?;
        let window = match window {
            ToaWindow::Symmetric => QcWindow::Symmetric,
            ToaWindow::Forward => QcWindow::Forward,
        };
        write(out, boxed(ToaClock(QuantumClock::new(spec, det, window))))
    })
}

/// # Safety
/// `clock` must come from [`toa_clock_new`] (or be null).
#[no_mangle]
pub unsafe extern "C" fn toa_clock_free(clock: *mut ToaClock) {
    if !clock.is_null() {
        drop(Box::from_raw(clock));
    }
}

/// N_QC(T) for `n` strictly increasing window lengths.
///
/// # Safety
/// `windows` and `out` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn toa_clock_denominators(
    clock: *const ToaClock,
    windows: *const f64,
    n: usize,
    out: *mut f64,
) -> ToaStatus {
    guard(|| {
        let c = &deref(clock, "clock")?.0;
        let values = core(c.denominators(slice(windows, n, "windows")?))?;
        write_slice(out, &values)
    })
}

/// Π_QC(t; T).
///
/// # Safety
/// `clock` live, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn toa_clock_density(clock: *const ToaClock, t: f64, window: f64, out: *mut f64) -> ToaStatus {
    guard(|| {
        let c = &deref(clock, "clock")?.0;
        write(out, core(c.density(t, window))?)
    })
}

/// P_QC(arrival in [t1, t2]) for each of `n` increasing window lengths.
///
/// # Safety
/// `windows` and `out` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn toa_clock_arrival_probabilities(
    clock: *const ToaClock,
    t1: f64,
    t2: f64,
    windows: *const f64,
    n: usize,
    out: *mut f64,
) -> ToaStatus {
    guard(|| {
        let c = &deref(clock, "clock")?.0;
        let values = core(c.arrival_probabilities(t1, t2, slice(windows, n, "windows")?))?;
        write_slice(out, &values)
    })
}

/// 1 − N_QC(T)/T; interval detectors only.
///
/// # Safety
/// `clock` live, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn toa_clock_nonarrival(clock: *const ToaClock, window: f64, out: *mut f64) -> ToaStatus {
    guard(|| {
        let c = &deref(clock, "clock")?.0;
        write(out, core(c.nonarrival(window))?)
    })
}

/// Closed-form slope of N_QC against ln T.
///
/// # Safety
/// `clock` live, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn toa_clock_predicted_log_slope(clock: *const ToaClock, out: *mut f64) -> ToaStatus {
    guard(|| write(out, deref(clock, "clock")?.0.predicted_log_slope()))
}

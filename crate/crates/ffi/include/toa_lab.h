#ifndef TOA_LAB_H
#define TOA_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ToaStatus {
  TOA_STATUS_OK = 0,
  TOA_STATUS_NULL_POINTER = 1,
  // Bad argument or configuration (invalid widths, windows, detectors...).
  TOA_STATUS_INVALID_ARGUMENT = 2,
  TOA_STATUS_NON_CONVERGENCE = 3,
  TOA_STATUS_DEGENERATE_NORMALIZATION = 4,
  TOA_STATUS_ALIASING = 5,
  TOA_STATUS_FIT_FAILED = 6,
  TOA_STATUS_PANIC = 7,
} ToaStatus;

typedef enum ToaKind {
  TOA_KIND_KIJOWSKI = 0,
  TOA_KIND_FLUX = 1,
  TOA_KIND_SEMI_CLASSICAL = 2,
} ToaKind;

typedef enum ToaDetectorKind {
  TOA_DETECTOR_KIND_POINT = 0,
  TOA_DETECTOR_KIND_INTERVAL = 1,
} ToaDetectorKind;

typedef enum ToaWindow {
  // [−T/2, T/2]
  TOA_WINDOW_SYMMETRIC = 0,
  // [0, T]
  TOA_WINDOW_FORWARD = 1,
} ToaWindow;

// The windowed quantum-clock density for one packet and detector.
typedef struct ToaClock ToaClock;

// A K, F or SC arrival-time density at a point detector.
typedef struct ToaDistribution ToaDistribution;

// A normalized superposition of Gaussian wave packets.
typedef struct ToaPacket ToaPacket;

// SI values of the natural units ħ = m = 1, length σ0.
typedef struct ToaUnitScales {
  double length_m;
  double time_s;
  double velocity_m_s;
  double momentum_kg_m_s;
} ToaUnitScales;

// A point at `a` (b ignored) or the interval [a, b].
typedef struct ToaDetector {
  enum ToaDetectorKind kind;
  double a;
  double b;
} ToaDetector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread ("" after a success).
// Valid until the next call into this library from the same thread.
const char *toa_last_error_message(void);

// Library version, static storage.
const char *toa_version(void);

// # Safety
// `out` must be valid for writes.
enum ToaStatus toa_unit_scales(double mass_kg, double sigma0_m, struct ToaUnitScales *out);

// Single Gaussian (dimensionless centre, width, mean momentum).
//
// # Safety
// `out` must be valid for writes; the handle must be released with
// [`toa_packet_free`].
enum ToaStatus toa_packet_gaussian(double center,
                                   double width,
                                   double momentum,
                                   struct ToaPacket **out);

// Odd state ψ(x − offset) − ψ(x + offset) at rest.
//
// # Safety
// As [`toa_packet_gaussian`].
enum ToaStatus toa_packet_odd_pair(double offset, double width, struct ToaPacket **out);

// Normalized superposition of `n` Gaussian terms.
//
// # Safety
// Each array must hold `n` values; `out` must be valid for writes.
enum ToaStatus toa_packet_superposition(uintptr_t n,
                                        const double *weights_re,
                                        const double *weights_im,
                                        const double *centers,
                                        const double *widths,
                                        const double *momenta,
                                        struct ToaPacket **out);

// # Safety
// `packet` must come from a `toa_packet_*` constructor (or be null) and is
// invalid afterwards.
void toa_packet_free(struct ToaPacket *packet);

// |ψ(x, t)|².
//
// # Safety
// `packet` must be a live handle and `out` valid for writes.
enum ToaStatus toa_packet_density(const struct ToaPacket *packet, double x, double t, double *out);

// Probability current J(x, t).
//
// # Safety
// As [`toa_packet_density`].
enum ToaStatus toa_packet_flux(const struct ToaPacket *packet, double x, double t, double *out);

// |φ̃(0)|², the coefficient of the ln T growth of the clock normalization.
//
// # Safety
// As [`toa_packet_density`].
enum ToaStatus toa_packet_momentum_density_at_zero(const struct ToaPacket *packet, double *out);

// K, F or SC density for a point detector at `x_d`.
//
// # Safety
// `packet` must be a live handle; `out` valid for writes. Release the
// result with [`toa_distribution_free`].
enum ToaStatus toa_distribution_new(const struct ToaPacket *packet,
                                    enum ToaKind kind,
                                    double x_d,
                                    struct ToaDistribution **out);

// # Safety
// `dist` must come from [`toa_distribution_new`] (or be null).
void toa_distribution_free(struct ToaDistribution *dist);

// Normalized density at each of `n` times.
//
// # Safety
// `times` and `out` must hold `n` values.
enum ToaStatus toa_distribution_density(const struct ToaDistribution *dist,
                                        const double *times,
                                        uintptr_t n,
                                        double *out);

// Probability mass before normalization.
//
// # Safety
// `dist` live, `out` valid for writes.
enum ToaStatus toa_distribution_raw_norm(const struct ToaDistribution *dist, double *out);

// Non-arrival probability ∫_T^∞ Π for nondecreasing cutoffs T.
//
// # Safety
// `cutoffs` and `out` must hold `n` values.
enum ToaStatus toa_distribution_nonarrival(const struct ToaDistribution *dist,
                                           const double *cutoffs,
                                           uintptr_t n,
                                           double *out);

// Quantum-clock density for a packet, detector and window placement.
//
// # Safety
// `packet` live, `out` valid for writes. Release with [`toa_clock_free`].
enum ToaStatus toa_clock_new(const struct ToaPacket *packet,
                             struct ToaDetector detector,
                             enum ToaWindow window,
                             struct ToaClock **out);

// # Safety
// `clock` must come from [`toa_clock_new`] (or be null).
void toa_clock_free(struct ToaClock *clock);

// N_QC(T) for `n` strictly increasing window lengths.
//
// # Safety
// `windows` and `out` must hold `n` values.
enum ToaStatus toa_clock_denominators(const struct ToaClock *clock,
                                      const double *windows,
                                      uintptr_t n,
                                      double *out);

// Π_QC(t; T).
//
// # Safety
// `clock` live, `out` valid for writes.
enum ToaStatus toa_clock_density(const struct ToaClock *clock,
                                 double t,
                                 double window,
                                 double *out);

// P_QC(arrival in [t1, t2]) for each of `n` increasing window lengths.
//
// # Safety
// `windows` and `out` must hold `n` values.
enum ToaStatus toa_clock_arrival_probabilities(const struct ToaClock *clock,
                                               double t1,
                                               double t2,
                                               const double *windows,
                                               uintptr_t n,
                                               double *out);

// 1 − N_QC(T)/T; interval detectors only.
//
// # Safety
// `clock` live, `out` valid for writes.
enum ToaStatus toa_clock_nonarrival(const struct ToaClock *clock, double window, double *out);

// Closed-form slope of N_QC against ln T.
//
// # Safety
// `clock` live, `out` valid for writes.
enum ToaStatus toa_clock_predicted_log_slope(const struct ToaClock *clock, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOA_LAB_H */

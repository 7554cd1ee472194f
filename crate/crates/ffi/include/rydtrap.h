#ifndef RYDTRAP_H
#define RYDTRAP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum RydtrapStatus {
  RYDTRAP_STATUS_OK = 0,
  RYDTRAP_STATUS_NULL_POINTER = 1,
  // Bad quantum numbers, term symbol, unit or parameter value.
  RYDTRAP_STATUS_INVALID_ARGUMENT = 2,
  // Input data missing, malformed or inconsistent.
  RYDTRAP_STATUS_DATA = 3,
  RYDTRAP_STATUS_IO = 4,
  RYDTRAP_STATUS_NONCONVERGENCE = 5,
  // The caller's buffer is too small; the needed length was written.
  RYDTRAP_STATUS_BUFFER_TOO_SMALL = 6,
  // A Rust panic was caught at the boundary.
  RYDTRAP_STATUS_PANIC = 7,
} RydtrapStatus;

// Opaque trap calculator: a species preset plus a tweezer beam.
typedef struct RydtrapCalculator RydtrapCalculator;

// Opaque fitted Rydberg–Ritz model.
typedef struct RydtrapRitzModel RydtrapRitzModel;

// Depth of one state; absent values are NaN.
typedef struct RydtrapDepth {
  double n_star;
  // U(∞) − U(focus), Hz; positive = trapped.
  double depth_hz;
  double core_depth_hz;
  double ponderomotive_depth_hz;
  double ground_depth_hz;
  double ratio_to_ground;
} RydtrapDepth;

typedef struct RydtrapPhotoionization {
  double gamma0_per_s;
  double gamma0_sigma_per_s;
  double gamma_pi_per_s_per_w;
  double gamma_pi_sigma_per_s_per_w;
  double cross_section_m2;
  double cross_section_sigma_m2;
} RydtrapPhotoionization;

typedef struct RydtrapAutoionization {
  double n_star;
  double core_depth_hz;
  double rate_per_s;
  // rate·n*³
  double scaled_rate_per_s;
  // Infinite when the rate vanishes.
  double lifetime_s;
} RydtrapAutoionization;

// Thermal dephasing scenario. Use an infinite `t1_s` for no population decay.
typedef struct RydtrapDephasing {
  double differential_shift_hz;
  double temperature_k;
  double depth_hz;
  // Depth of the trap the atoms were cooled in.
  double loading_depth_hz;
  // Radial, radial, axial.
  double trap_frequencies_hz[3];
  double t1_s;
  uintptr_t ensemble_size;
  uint64_t seed;
} RydtrapDephasing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next call into the library from the same thread.
const char *rydtrap_last_error_message(void);

// Library version, a static NUL-terminated string.
const char *rydtrap_version(void);

// Wigner 3j symbol; all arguments are twice the angular momentum.
//
// # Safety
// `out` must be NULL or point to writable memory.
enum RydtrapStatus rydtrap_wigner_3j(int j1, int j2, int j3, int m1, int m2, int m3, double *out);

// Wigner 6j symbol; all arguments are twice the angular momentum.
//
// # Safety
// `out` must be NULL or point to writable memory.
enum RydtrapStatus rydtrap_wigner_6j(int j1, int j2, int j3, int j4, int j5, int j6, double *out);

// Exact angular factor of rank `k` for `term` at projection `twice_m / 2`,
// as numerator / denominator.
//
// # Safety
// `term` must be a NUL-terminated string; outputs must be writable.
enum RydtrapStatus rydtrap_angular_factor(const char *term,
                                          unsigned int k,
                                          int twice_m,
                                          int64_t *numerator,
                                          int64_t *denominator);

// New calculator for `species` ("yb174", "yb174-calc", "rb87") and a
// Gaussian beam. `efficiency` is the delivered fraction of `power_w`.
//
// # Safety
// `species` must be a NUL-terminated string; `out` must be writable.
enum RydtrapStatus rydtrap_calculator_new(const char *species,
                                          double wavelength_m,
                                          double waist_m,
                                          double power_w,
                                          double efficiency,
                                          struct RydtrapCalculator **out);

// Release a calculator. NULL is ignored.
//
// # Safety
// `calc` must come from [`rydtrap_calculator_new`] and not be used afterwards.
void rydtrap_calculator_free(struct RydtrapCalculator *calc);

// Trap depth of `n term` at projection `twice_m / 2`.
//
// # Safety
// Pointers must be valid; `term` NUL-terminated.
enum RydtrapStatus rydtrap_trap_depth(const struct RydtrapCalculator *calc,
                                      unsigned int n,
                                      const char *term,
                                      int twice_m,
                                      struct RydtrapDepth *out);

// M-resolved tensor shifts (Hz, relative to the M average) for M = −J … J.
// `len` receives 2J+1; if `capacity` is smaller, nothing else is written
// and `RYDTRAP_STATUS_BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `shifts_hz` must have room for `capacity` doubles.
enum RydtrapStatus rydtrap_tensor_splitting(const struct RydtrapCalculator *calc,
                                            unsigned int n,
                                            const char *term,
                                            double *shifts_hz,
                                            uintptr_t capacity,
                                            uintptr_t *len);

// U(a) − U(b) at the focus, Hz. Independent of the core polarizability.
//
// # Safety
// Pointers must be valid; terms NUL-terminated.
enum RydtrapStatus rydtrap_differential_shift(const struct RydtrapCalculator *calc,
                                              unsigned int n_a,
                                              const char *term_a,
                                              int twice_m_a,
                                              unsigned int n_b,
                                              const char *term_b,
                                              int twice_m_b,
                                              double *out_hz);

// Fit the bundled ¹⁷⁴Yb ³S₁ energies over the inclusive window [n_min, n_max].
//
// # Safety
// `out` must be writable.
enum RydtrapStatus rydtrap_ritz_fit_bundled(unsigned int order,
                                            unsigned int n_min,
                                            unsigned int n_max,
                                            struct RydtrapRitzModel **out);

// Fit energies from a CSV file (`n,energy_cm1[,sigma_mhz]`) using the
// ¹⁷⁴Yb threshold and Rydberg constant.
//
// # Safety
// `path` must be NUL-terminated; `out` writable.
enum RydtrapStatus rydtrap_ritz_fit_csv(const char *path,
                                        unsigned int order,
                                        unsigned int n_min,
                                        unsigned int n_max,
                                        struct RydtrapRitzModel **out);

// Release a model. NULL is ignored.
//
// # Safety
// `model` must come from a `rydtrap_ritz_fit_*` call and not be used afterwards.
void rydtrap_ritz_free(struct RydtrapRitzModel *model);

// δ₀, δ₂, … and their 1σ uncertainties. Same buffer protocol as
// [`rydtrap_tensor_splitting`].
//
// # Safety
// `values` and `sigmas` must each hold `capacity` doubles.
enum RydtrapStatus rydtrap_ritz_coefficients(const struct RydtrapRitzModel *model,
                                             double *values,
                                             double *sigmas,
                                             uintptr_t capacity,
                                             uintptr_t *len);

// RMS residual of the fit, MHz.
//
// # Safety
// Pointers must be valid.
enum RydtrapStatus rydtrap_ritz_rms_mhz(const struct RydtrapRitzModel *model, double *out);

// Model energy of level `n`, cm⁻¹.
//
// # Safety
// Pointers must be valid.
enum RydtrapStatus rydtrap_ritz_energy_cm1(const struct RydtrapRitzModel *model,
                                           unsigned int n,
                                           double *out);

// Weighted fit of Γ = Γ₀ + γ_PI·P to `len` lifetime measurements. A
// non-positive sigma selects the default 6% relative uncertainty.
//
// # Safety
// The three arrays must each hold `len` doubles.
enum RydtrapStatus rydtrap_photoionization_fit(const double *power_w,
                                               const double *lifetime_s,
                                               const double *sigma_s,
                                               uintptr_t len,
                                               double wavelength_m,
                                               double waist_m,
                                               double thermal_factor,
                                               struct RydtrapPhotoionization *out);

// Isolated-core autoionization estimate for `n term` in the calculator's beam.
//
// # Safety
// Pointers must be valid; `term` NUL-terminated.
enum RydtrapStatus rydtrap_autoionization(const struct RydtrapCalculator *calc,
                                          unsigned int n,
                                          const char *term,
                                          struct RydtrapAutoionization *out);

// Ramsey contrast at `len` times. `decay_time_s` (may be NULL) receives the
// 1/e time, or NaN if the curve stays above 1/e.
//
// # Safety
// `times_s` and `contrast_out` must hold `len` doubles.
enum RydtrapStatus rydtrap_ramsey_contrast(const struct RydtrapDephasing *scenario,
                                           const double *times_s,
                                           uintptr_t len,
                                           double *contrast_out,
                                           double *decay_time_s);

// Spin-echo contrast; total sequence time t with the π pulse at t/2.
//
// # Safety
// As for [`rydtrap_ramsey_contrast`].
enum RydtrapStatus rydtrap_echo_contrast(const struct RydtrapDephasing *scenario,
                                         const double *times_s,
                                         uintptr_t len,
                                         double *contrast_out,
                                         double *decay_time_s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RYDTRAP_H */

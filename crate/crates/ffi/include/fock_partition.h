#ifndef FOCK_PARTITION_H
#define FOCK_PARTITION_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Which partition family to sum.
typedef enum fp_family {
  // Binomial states, parameter σ.
  FP_FAMILY_BINOMIAL = 0,
  // Negative binomial states, parameter γ.
  FP_FAMILY_NEGATIVE_BINOMIAL = 1,
} fp_family;

// Result codes. `FP_STATUS_OK` is zero; everything else is an error.
typedef enum fp_status {
  FP_STATUS_OK = 0,
  FP_STATUS_NULL_POINTER = 1,
  FP_STATUS_DOMAIN = 2,
  FP_STATUS_CONVERGENCE = 3,
  FP_STATUS_CUTOFF = 4,
  FP_STATUS_DEGENERATE = 5,
  FP_STATUS_QUADRATURE = 6,
  FP_STATUS_BUFFER_TOO_SMALL = 7,
  FP_STATUS_PANIC = 8,
} fp_status;

// Opaque diagonal state.
typedef struct fp_state fp_state;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *fp_version(void);

// Length in bytes of the last error message on this thread, without the
// terminating NUL. Zero when the last call succeeded.
size_t fp_last_error_length(void);

// Copy the last error message into `buf` (NUL-terminated, truncated to
// `len - 1` bytes). Returns the full message length.
//
// # Safety
// `buf` must be valid for `len` bytes or null.
size_t fp_last_error_message(char *buf, size_t len);

// Number state |m⟩ in a cutoff of dimension `dim`.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum fp_status fp_state_number(size_t m, size_t dim, struct fp_state **out);

// Binomial state with `n` trials and success probability `sigma`.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum fp_status fp_state_binomial(size_t n, double sigma, size_t dim, struct fp_state **out);

// Negative binomial state. The cutoff grows past `dim` when the tail
// would otherwise exceed 1e-12.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum fp_status fp_state_negbinomial(size_t s, double gamma, size_t dim, struct fp_state **out);

// Thermal state at fixed cutoff; the dropped mass is reported as tail.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum fp_status fp_state_thermal(double gamma, size_t dim, struct fp_state **out);

// Release a handle. Null is ignored.
//
// # Safety
// `state` must come from this library and not be used afterwards.
void fp_state_free(struct fp_state *state);

// Dimension of the retained block.
//
// # Safety
// Pointers must be valid or null.
enum fp_status fp_state_dim(const struct fp_state *state, size_t *dim);

// Diagonal probabilities. `needed` receives the state dimension even when
// `len` is too small.
//
// # Safety
// `buf` must be valid for `len` doubles; `needed` may be null.
enum fp_status fp_state_probs(const struct fp_state *state,
                              double *buf,
                              size_t len,
                              size_t *needed);

// Probability mass beyond the cutoff.
//
// # Safety
// Pointers must be valid or null.
enum fp_status fp_state_tail_mass(const struct fp_state *state, double *tail);

// Mean photon number with a bound on the contribution of the tail.
//
// # Safety
// Pointers must be valid; `tail_bound` may be null.
enum fp_status fp_state_mean_photon(const struct fp_state *state, double *mean, double *tail_bound);

// Apply amplitude damping with dimensionless time `kt` (survival e^{-2kt}).
// The result is a new handle.
//
// # Safety
// `state` must be a live handle and `out` a valid handle slot.
enum fp_status fp_state_damp(const struct fp_state *state, double kt, struct fp_state **out);

// Subtract `s` photons. The renormalised state goes to `out` and the
// pre-normalisation trace to `norm` (may be null).
//
// # Safety
// `state` must be a live handle and `out` a valid handle slot.
enum fp_status fp_state_photon_subtract(const struct fp_state *state,
                                        size_t s,
                                        struct fp_state **out,
                                        double *norm);

// Per-level residuals of the truncated partition of unity. `buf` receives
// `levels` values and `max_residual` (may be null) their maximum.
//
// # Safety
// `buf` must be valid for `len` doubles.
enum fp_status fp_partition_residuals(enum fp_family family,
                                      double param,
                                      size_t terms,
                                      size_t levels,
                                      double *buf,
                                      size_t len,
                                      double *max_residual);

// Run every built-in verification check at run tolerance `tol`
// (pinned tolerances still apply). Writes the number of checks and
// failures; returns `FP_STATUS_OK` even when checks fail.
//
// # Safety
// `total` and `failed` must be valid pointers.
enum fp_status fp_verify_all(double tol, size_t *total, size_t *failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOCK_PARTITION_H */

#ifndef FWL_H
#define FWL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a call.
typedef enum FwlStatus {
  FWL_STATUS_OK = 0,
  FWL_STATUS_NULL_POINTER = 1,
  FWL_STATUS_INVALID_ARGUMENT = 2,
  FWL_STATUS_CONFIG = 3,
  FWL_STATUS_UNKNOWN_SCENARIO = 4,
  FWL_STATUS_PERTURBATION_TOO_LARGE = 5,
  FWL_STATUS_DOMAIN_COLLAPSED = 6,
  FWL_STATUS_SINGULAR = 7,
  FWL_STATUS_NUMERICAL = 8,
  FWL_STATUS_IO = 9,
  FWL_STATUS_PANIC = 10,
} FwlStatus;

// Output format for [`fwl_suite_run`], passed as its integer value.
typedef enum FwlFormat {
  FWL_FORMAT_CSV = 0,
  FWL_FORMAT_JSON = 1,
} FwlFormat;

// A perturbation `ζ`.
typedef struct FwlPerturbation FwlPerturbation;

// A polyhedral function of one variable with compact domain.
typedef struct FwlPolyhedral FwlPolyhedral;

// A set of scenarios.
typedef struct FwlSuite FwlSuite;

// Both sides of the first-variation identity for one scenario.
typedef struct FwlVariation {
  double lhs;
  double rhs_bulk;
  double rhs_boundary;
  double rhs_total;
  double abs_err;
  bool pass;
} FwlVariation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next `fwl_*` call on the same thread.
const char *fwl_last_error_message(void);

// Library version as a static string.
const char *fwl_version(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void fwl_string_free(char *s);

// Lower convex envelope of the generators `(xs[i], zs[i])`.
//
// # Safety
// `xs` and `zs` must point to `len` doubles; `out` must be writable.
enum FwlStatus fwl_polyhedral_new(const double *xs,
                                  const double *zs,
                                  size_t len,
                                  struct FwlPolyhedral **out);

// # Safety
// `u` must come from this library and not have been freed; null is ignored.
void fwl_polyhedral_free(struct FwlPolyhedral *u);

// Endpoints of the domain.
//
// # Safety
// Pointers must be valid.
enum FwlStatus fwl_polyhedral_domain(const struct FwlPolyhedral *u, double *lo, double *hi);

// `u(x)`, `+∞` outside the domain.
//
// # Safety
// Pointers must be valid.
enum FwlStatus fwl_polyhedral_evaluate(const struct FwlPolyhedral *u, double x, double *value);

// `u*(y)`.
//
// # Safety
// Pointers must be valid.
enum FwlStatus fwl_polyhedral_conjugate(const struct FwlPolyhedral *u, double y, double *value);

// Infimal convolution `u □ v` as a new handle.
//
// # Safety
// Pointers must be valid.
enum FwlStatus fwl_polyhedral_inf_conv(const struct FwlPolyhedral *u,
                                       const struct FwlPolyhedral *v,
                                       struct FwlPolyhedral **result);

// `μ_q(u) = ∫ e^{−u} |x|^{q−1} dx`; pass `q = NaN` for the plain volume.
//
// # Safety
// Pointers must be valid.
enum FwlStatus fwl_polyhedral_measure(const struct FwlPolyhedral *u, double q, double *value);

// Perturbation from its JSON form, e.g. `{"kind": "norm", "coeff": 1}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum FwlStatus fwl_perturbation_from_json(const char *json, struct FwlPerturbation **result);

// # Safety
// `z` must come from this library and not have been freed; null is ignored.
void fwl_perturbation_free(struct FwlPerturbation *z);

// Finite-difference derivative of `t ↦ μ_q((u* + tζ)*)` at `0` against
// the bulk + boundary formula, on the exact track. `q = NaN` selects the
// plain volume.
//
// # Safety
// Pointers must be valid.
enum FwlStatus fwl_first_variation(const struct FwlPolyhedral *u,
                                   const struct FwlPerturbation *zeta,
                                   double q,
                                   struct FwlVariation *result);

// The built-in standard suite.
//
// # Safety
// `out` must be writable.
enum FwlStatus fwl_suite_standard(struct FwlSuite **result);

// A suite parsed from a JSON document with a `scenarios` array.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum FwlStatus fwl_suite_from_json(const char *json, struct FwlSuite **result);

// # Safety
// `s` must come from this library and not have been freed; null is ignored.
void fwl_suite_free(struct FwlSuite *s);

// Number of scenarios in the suite.
//
// # Safety
// Pointers must be valid.
enum FwlStatus fwl_suite_len(const struct FwlSuite *s, size_t *len);

// Runs one scenario (or all when `scenario` is null) and writes the
// report to `*report`, to be freed with [`fwl_string_free`]. `*all_passed`
// tells whether every record passed; a failing identity is not an error.
//
// # Safety
// Pointers must be valid; `scenario` may be null.
enum FwlStatus fwl_suite_run(const struct FwlSuite *s,
                             const char *scenario,
                             uint64_t seed,
                             uint32_t format,
                             char **report,
                             bool *all_passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FWL_H */

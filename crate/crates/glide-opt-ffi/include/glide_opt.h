/* C ABI for the glide-opt nonsmooth convex optimization solvers. */

#ifndef GLIDE_OPT_H
#define GLIDE_OPT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every FFI entry point.
typedef enum GlideStatus {
  GLIDE_STATUS_OK = 0,
  GLIDE_STATUS_NULL_POINTER = 1,
  GLIDE_STATUS_INVALID_ARGUMENT = 2,
  GLIDE_STATUS_PARSE_ERROR = 3,
  GLIDE_STATUS_DIMENSION_MISMATCH = 4,
  GLIDE_STATUS_PRECONDITION_VIOLATED = 5,
  GLIDE_STATUS_NUMERICAL_FAILURE = 6,
  // The subdifferential is empty at the query point (data, not an error
  // in the solver sense; no gradient is written).
  GLIDE_STATUS_SUBGRADIENT_UNDEFINED = 7,
  GLIDE_STATUS_INTERNAL_ERROR = 8,
} GlideStatus;

// Opaque objective-oracle handle.
typedef struct GlideOracle GlideOracle;

// Opaque feasible-region handle.
typedef struct GlideRegion GlideRegion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a feasible region from its JSON description, e.g.
// `{"type":"ellipse2d","k1":2,"k2":5,"r":100}`.
//
// # Safety
// `json` must point to a NUL-terminated string and `out` must be valid for
// writes.
enum GlideStatus glide_region_from_json(const char *json, struct GlideRegion **out);

// # Safety
// `region` must be a valid handle or NULL.
void glide_region_free(struct GlideRegion *region);

// # Safety
// `region` and `out` must be valid pointers.
enum GlideStatus glide_region_dim(const struct GlideRegion *region, size_t *out);

// Closed membership test (constraint value within tolerance of the bound).
//
// # Safety
// `region`, `coords` (length `dim`) and `out` must be valid pointers.
enum GlideStatus glide_region_contains(const struct GlideRegion *region,
                                       const double *coords,
                                       size_t dim,
                                       bool *out);

// Strict-interior test with the library's interior margin.
//
// # Safety
// `region`, `coords` (length `dim`) and `out` must be valid pointers.
enum GlideStatus glide_region_strictly_interior(const struct GlideRegion *region,
                                                const double *coords,
                                                size_t dim,
                                                bool *out);

// Euclidean projection. Writes the projected point into `out_point`
// (length `dim`); `out_residual` and `out_on_boundary` are optional.
//
// # Safety
// `region`, `coords` and `out_point` must be valid for `dim` doubles;
// the two optional out-pointers may be NULL.
enum GlideStatus glide_region_project(const struct GlideRegion *region,
                                      const double *coords,
                                      size_t dim,
                                      double *out_point,
                                      double *out_residual,
                                      bool *out_on_boundary);

// Builds an oracle from its JSON description, e.g.
// `{"example":"e1","k1":2,"k2":5,"r":100}` or `{"example":"l1-box","n":2}`.
//
// # Safety
// `json` must point to a NUL-terminated string and `out` must be valid.
enum GlideStatus glide_oracle_from_json(const char *json, struct GlideOracle **out);

// # Safety
// `oracle` must be a valid handle or NULL.
void glide_oracle_free(struct GlideOracle *oracle);

// # Safety
// `oracle` and `out` must be valid pointers.
enum GlideStatus glide_oracle_dim(const struct GlideOracle *oracle, size_t *out);

// Objective value at a feasible point (may be +inf where the extended
// objective is infinite).
//
// # Safety
// `oracle`, `coords` (length `dim`) and `out` must be valid pointers.
enum GlideStatus glide_oracle_evaluate(const struct GlideOracle *oracle,
                                       const double *coords,
                                       size_t dim,
                                       double *out);

// Subgradient at a point. Returns `GLIDE_STATUS_SUBGRADIENT_UNDEFINED`
// (without touching `out_g`) where the subdifferential is empty.
//
// # Safety
// `oracle` and `coords`/`out_g` (length `dim`) must be valid pointers.
enum GlideStatus glide_oracle_subgradient(const struct GlideOracle *oracle,
                                          const double *coords,
                                          size_t dim,
                                          double *out_g);

// Runs PSG/SGM from JSON configs and returns the run record as a JSON
// string. `solver_json` follows the library's solver-section schema, e.g.
// `{"method":"sgm","alpha":{"type":"adaptive-g","a":1.0},"beta":{"type":"constant","value":0.5},"t":100}`
// (missing `R`/`L`/`mu` are filled from the oracle metadata).
//
// # Safety
// `oracle_json`/`solver_json` must be NUL-terminated strings, `x1` valid
// for `dim` doubles, `out_json` valid for writes.
enum GlideStatus glide_solve_json(const char *oracle_json,
                                  const char *solver_json,
                                  const double *x1,
                                  size_t dim,
                                  uint64_t seed,
                                  char **out_json);

// Analytic one-step-failure predicate of PSG on the ellipse instance.
//
// # Safety
// `out` must be valid for writes.
enum GlideStatus glide_e1_failure_predicate(double r,
                                            double c,
                                            double theta,
                                            double rho,
                                            bool *out);

// One-step PSG failure probability on the negative-entropy instance:
// writes the root of the auxiliary function and `1 - (p/B)^n`.
//
// # Safety
// `out_p_root` and `out_prob` must be valid for writes.
enum GlideStatus glide_e3_failure_probability(double b,
                                              double mu,
                                              uint32_t n,
                                              double *out_p_root,
                                              double *out_prob);

// Frees a string returned by this library.
//
// # Safety
// `s` must have been returned by a glide-opt FFI call and not freed yet.
void glide_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GLIDE_OPT_H */

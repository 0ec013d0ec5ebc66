#ifndef HYDRA_H
#define HYDRA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum HydraStatus {
  HYDRA_STATUS_OK = 0,
  HYDRA_STATUS_NULL_POINTER = 1,
  HYDRA_STATUS_INVALID_UTF8 = 2,
  HYDRA_STATUS_PARSE = 3,
  HYDRA_STATUS_DOMAIN = 4,
  HYDRA_STATUS_CAPABILITY = 5,
  HYDRA_STATUS_RESOURCE = 6,
  HYDRA_STATUS_PRECONDITION = 7,
  HYDRA_STATUS_TOLERANCE = 8,
  HYDRA_STATUS_POLE = 9,
  HYDRA_STATUS_IO = 10,
  HYDRA_STATUS_PANIC = 11,
} HydraStatus;

typedef enum HydraSeriesKind {
  HYDRA_SERIES_KIND_ORDINARY = 0,
  HYDRA_SERIES_KIND_FOURIER = 1,
  HYDRA_SERIES_KIND_EXPONENTIAL = 2,
} HydraSeriesKind;

typedef enum HydraDiagnostic {
  HYDRA_DIAGNOSTIC_CONVERGED = 0,
  HYDRA_DIAGNOSTIC_OSCILLATORY = 1,
  HYDRA_DIAGNOSTIC_DIVERGENT = 2,
} HydraDiagnostic;

// Opaque hydra map.
typedef struct HydraMapHandle HydraMapHandle;

// Opaque finitely supported function on Q/Z.
typedef struct HydraQzHandle HydraQzHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on this thread.
const char *hydra_last_error(void);

// Library version as a static NUL-terminated string.
const char *hydra_version(void);

// Releases a string returned by this library. Null is ignored.
void hydra_string_free(char *s);

// Creates a map from a catalog name (`H3`, `T+1`, ...) or a JSON config path.
enum HydraStatus hydra_map_from_source(const char *source, struct HydraMapHandle **out);

// Creates a map from JSON text `{"rho": .., "branches": [{"a":..,"b":..,"d":..}, ..]}`.
enum HydraStatus hydra_map_from_json(const char *json, struct HydraMapHandle **out);

void hydra_map_free(struct HydraMapHandle *map);

// `rho` of the map, or 0 for a null handle.
uint64_t hydra_map_rho(const struct HydraMapHandle *map);

// `H(n)`; `Domain` when the image overflows 64 bits.
enum HydraStatus hydra_map_apply(const struct HydraMapHandle *map, uint64_t n, uint64_t *out);

enum HydraStatus hydra_map_digest(const struct HydraMapHandle *map, char **out);

// Validation report as JSON.
enum HydraStatus hydra_map_validate(const struct HydraMapHandle *map, char **out);

// Trajectory of `n` as JSON.
enum HydraStatus hydra_orbit(const struct HydraMapHandle *map,
                             uint64_t n,
                             uint64_t max_steps,
                             uint64_t max_value,
                             char **out);

// Parses a function from `{"points": [{"t": "1/5", "value": [["1/2", "E(1,0)"]]}]}`.
enum HydraStatus hydra_qz_from_json(const char *json, struct HydraQzHandle **out);

// The indicator `1_t` of the class of `t` (text such as `"1/5"`).
enum HydraStatus hydra_qz_indicator(const char *t, struct HydraQzHandle **out);

void hydra_qz_free(struct HydraQzHandle *f);

// Number of support points, or 0 for a null handle.
uint64_t hydra_qz_len(const struct HydraQzHandle *f);

enum HydraStatus hydra_qz_to_json(const struct HydraQzHandle *f, char **out);

// Exact equality of two functions.
enum HydraStatus hydra_qz_equal(const struct HydraQzHandle *a,
                                const struct HydraQzHandle *b,
                                bool *out);

// Applies the dreamcatcher operator of `map` to `f`, producing a new handle.
enum HydraStatus hydra_qh_apply(const struct HydraMapHandle *map,
                                const struct HydraQzHandle *f,
                                struct HydraQzHandle **out);

// Image set of `1_t` as JSON.
enum HydraStatus hydra_qh_apply_basis(const struct HydraMapHandle *map, const char *t, char **out);

// Exact comparison of the two basis formulas at class `t` and integer `n`.
enum HydraStatus hydra_qh_check_profinite(const struct HydraMapHandle *map,
                                          const char *t,
                                          int64_t n,
                                          bool *out);

// Support-growth walk from `tau` as JSON.
enum HydraStatus hydra_walk(const struct HydraMapHandle *map,
                            const char *tau,
                            uint64_t steps,
                            char **out);

// Truncated fixed-point kernel as JSON; `conductor_cap = 0` keeps the default cap.
enum HydraStatus hydra_kernel(const struct HydraMapHandle *map,
                              uint64_t denom_bound,
                              bool off_rho_only,
                              uint64_t conductor_cap,
                              char **out);

// Evaluates the set-series of `set` (mini-language text) at `re + i im`.
enum HydraStatus hydra_eval_series(const char *set,
                                   enum HydraSeriesKind kind,
                                   double re,
                                   double im,
                                   uint64_t n_max,
                                   double tail_tol,
                                   double *out_re,
                                   double *out_im,
                                   double *out_tail);

// Virtual residue of `set` at the class `x` over the default schedule.
enum HydraStatus hydra_virtual_residue(const char *set,
                                       const char *x,
                                       double *out_re,
                                       double *out_im,
                                       enum HydraDiagnostic *out_diagnostic);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYDRA_H */

#ifndef PTLAB_H
#define PTLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stdint.h>

typedef enum PtlabStatus {
  PTLAB_STATUS_OK = 0,
  PTLAB_STATUS_INVALID_ARGUMENT = 1,
  PTLAB_STATUS_INVALID_DIMENSION = 2,
  PTLAB_STATUS_DIMENSION_MISMATCH = 3,
  PTLAB_STATUS_RESOURCE_LIMIT = 4,
  PTLAB_STATUS_PRECONDITION = 5,
  PTLAB_STATUS_OVERFLOW = 6,
  PTLAB_STATUS_UNSUPPORTED_ORDER = 7,
  PTLAB_STATUS_NULL_POINTER = 8,
  PTLAB_STATUS_PANIC = 9,
} PtlabStatus;

typedef enum PtlabMode {
  PTLAB_MODE_EXACT = 0,
  PTLAB_MODE_SIMULATED = 1,
} PtlabMode;

typedef struct PtlabCertificate PtlabCertificate;

// Joint measurement distribution of one question.
typedef struct PtlabGrid PtlabGrid;

typedef struct PtlabReport PtlabReport;

// Outcome of one sampled round.
typedef struct PtlabRound {
  uint32_t c_a;
  uint32_t c_b;
  bool win;
} PtlabRound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next failing call on the same thread.
const char *ptlab_last_error_message(void);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void ptlab_string_free(char *s);

// # Safety
// `out` must be valid for writes.
enum PtlabStatus ptlab_is_edge(uint32_t n_bits, uint32_t u, uint32_t v, bool *out);

// Independence number of `G_{4k}`; `k` must be an odd prime power.
//
// # Safety
// `out` must be valid for writes.
enum PtlabStatus ptlab_frankl_alpha(uint64_t k, uint64_t *out);

// # Safety
// `out` must be valid for writes.
enum PtlabStatus ptlab_chromatic_lower_bound(uint64_t vertex_count, uint64_t alpha, uint64_t *out);

// Exact `Pr[c_A = c_B]` as a reduced fraction.
//
// # Safety
// `numer` and `denom` must be valid for writes.
enum PtlabStatus ptlab_collision_probability(uint32_t n_bits,
                                             uint32_t a,
                                             uint32_t b,
                                             uint64_t *numer,
                                             uint64_t *denom);

// Simulates the protocol on `(a, b)` (promise not required).
//
// # Safety
// `out` must be valid for writes. The handle written there must be released
// with [`ptlab_grid_free`].
enum PtlabStatus ptlab_run_protocol(uint32_t n_bits,
                                    uint32_t a,
                                    uint32_t b,
                                    struct PtlabGrid **out);

// # Safety
// `grid` must be NULL or a live handle from [`ptlab_run_protocol`].
uint32_t ptlab_grid_dim(const struct PtlabGrid *grid);

// # Safety
// `grid` must be a live handle and `out` valid for writes.
enum PtlabStatus ptlab_grid_probability(const struct PtlabGrid *grid,
                                        uint32_t j_a,
                                        uint32_t j_b,
                                        double *out);

// `Pr[c_A = c_B]` from the simulated grid; NaN for a NULL handle.
//
// # Safety
// `grid` must be NULL or a live handle.
double ptlab_grid_collision(const struct PtlabGrid *grid);

// # Safety
// `grid` must be NULL or a handle not yet freed.
void ptlab_grid_free(struct PtlabGrid *grid);

// # Safety
// `out` must be valid for writes.
enum PtlabStatus ptlab_sample_round(uint32_t n_bits,
                                    uint32_t a,
                                    uint32_t b,
                                    uint64_t seed,
                                    struct PtlabRound *out);

// Verifies the entangled strategy on `G_N`. `jobs = 0` uses every core.
// `allow_large_exact` permits exhaustive exact mode at `N = 16`.
//
// # Safety
// `out` must be valid for writes; release the report with
// [`ptlab_report_free`].
enum PtlabStatus ptlab_verify(uint32_t n_bits,
                              enum PtlabMode mode,
                              uint64_t sample,
                              uint64_t seed,
                              uint32_t jobs,
                              bool allow_large_exact,
                              struct PtlabReport **out);

// # Safety
// `report` must be NULL or a live handle.
uint64_t ptlab_report_questions_checked(const struct PtlabReport *report);

// Failure count; `u64::MAX` for a NULL handle.
//
// # Safety
// `report` must be NULL or a live handle.
uint64_t ptlab_report_failures(const struct PtlabReport *report);

// # Safety
// `report` must be NULL or a live handle.
double ptlab_report_max_leak(const struct PtlabReport *report);

// JSON rendering, or NULL for a NULL handle.
//
// # Safety
// `report` must be NULL or a live handle.
char *ptlab_report_to_json(const struct PtlabReport *report);

// # Safety
// `report` must be NULL or a handle not yet freed.
void ptlab_report_free(struct PtlabReport *report);

// Builds a pseudo-telepathy certificate for `c = N`. When the quantum side
// is sampled, `sample` and `seed` control the draw; `jobs = 0` uses every
// core.
//
// # Safety
// `out` must be valid for writes; release with [`ptlab_certificate_free`].
enum PtlabStatus ptlab_certificate(uint32_t n_bits,
                                   bool use_subgraph,
                                   uint64_t sample,
                                   uint64_t seed,
                                   uint32_t jobs,
                                   struct PtlabCertificate **out);

// # Safety
// `cert` must be NULL or a live handle.
bool ptlab_certificate_verdict(const struct PtlabCertificate *cert);

// # Safety
// `cert` must be NULL or a live handle.
uint64_t ptlab_certificate_chi_lower_bound(const struct PtlabCertificate *cert);

// # Safety
// `cert` must be NULL or a live handle.
char *ptlab_certificate_to_json(const struct PtlabCertificate *cert);

// # Safety
// `cert` must be NULL or a handle not yet freed.
void ptlab_certificate_free(struct PtlabCertificate *cert);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PTLAB_H */

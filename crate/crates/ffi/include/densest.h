#ifndef DENSEST_H
#define DENSEST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DseStatus {
  DSE_STATUS_OK = 0,
  DSE_STATUS_NULL_POINTER = 1,
  DSE_STATUS_INVALID_ARGUMENT = 2,
  DSE_STATUS_IO = 3,
  DSE_STATUS_PARSE = 4,
  DSE_STATUS_MEMORY_BUDGET = 5,
  DSE_STATUS_UNSUPPORTED = 6,
  DSE_STATUS_PANIC = 7,
} DseStatus;

/**
 * Opaque graph handle.
 */
typedef struct DseGraph DseGraph;

/**
 * Opaque solver result.
 */
typedef struct DseResult DseResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dse_last_error(void);

/**
 * Loads a MatrixMarket (`.mtx`) or edge-list file. `memory_budget` of 0
 * means unlimited.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DseStatus dse_graph_load(const char *path,
                              int weighted,
                              size_t memory_budget,
                              struct DseGraph **out);

/**
 * Builds a graph from `m` edges `(src[i], dst[i])`. `weights` may be null
 * for an unweighted graph.
 *
 * # Safety
 * `src` and `dst` (and `weights` when non-null) must point to `m` elements.
 */
enum DseStatus dse_graph_from_edges(size_t n,
                                    const uint32_t *src,
                                    const uint32_t *dst,
                                    const double *weights,
                                    size_t m,
                                    struct DseGraph **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum DseStatus dse_graph_gen_worstcase(size_t t, size_t p, struct DseGraph **out);

/**
 * # Safety
 * `graph` must come from a `dse_graph_*` constructor and not be freed yet.
 */
void dse_graph_free(struct DseGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null (returns 0).
 */
size_t dse_graph_n(const struct DseGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null (returns 0).
 */
size_t dse_graph_m(const struct DseGraph *graph);

/**
 * Density of the whole graph; NaN for null or empty graphs.
 *
 * # Safety
 * `graph` must be a live handle or null.
 */
double dse_graph_density(const struct DseGraph *graph);

/**
 * Greedy peeling.
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum DseStatus dse_peel(const struct DseGraph *graph, struct DseResult **out);

/**
 * Exact optimum. `tolerance <= 0` picks the default; `memory_budget` of 0
 * means unlimited.
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum DseStatus dse_exact(const struct DseGraph *graph,
                         double tolerance,
                         size_t memory_budget,
                         struct DseResult **out);

/**
 * Hybrid solve. `skip_ratio <= 0` picks the default. An exact phase that
 * exceeds `memory_budget` still yields a result, flagged by
 * [`dse_result_failed`].
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum DseStatus dse_hybrid(const struct DseGraph *graph,
                          double skip_ratio,
                          size_t memory_budget,
                          struct DseResult **out);

/**
 * # Safety
 * `result` must be a live handle or null (returns NaN).
 */
double dse_result_density(const struct DseResult *result);

/**
 * # Safety
 * `result` must be a live handle or null (returns 0).
 */
size_t dse_result_size(const struct DseResult *result);

/**
 * # Safety
 * `result` must be a live handle or null (returns NaN).
 */
double dse_result_time_ms(const struct DseResult *result);

/**
 * 1 when the hybrid exact phase failed and the greedy answer was kept.
 *
 * # Safety
 * `result` must be a live handle or null (returns 0).
 */
int dse_result_failed(const struct DseResult *result);

/**
 * Copies up to `capacity` member ids (sorted, 0-based) into `buf` and
 * returns the total number of members.
 *
 * # Safety
 * `buf` must have room for `capacity` elements, or be null with capacity 0.
 */
size_t dse_result_members(const struct DseResult *result, uint32_t *buf, size_t capacity);

/**
 * # Safety
 * `result` must come from a solver call and not be freed yet.
 */
void dse_result_free(struct DseResult *result);

/**
 * Writes the LP relaxation to `path`; the output pointers may be null.
 *
 * # Safety
 * `graph` must be a live handle and `path` a NUL-terminated string.
 */
enum DseStatus dse_lp_export(const struct DseGraph *graph,
                             const char *path,
                             size_t *variables,
                             size_t *constraints);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DENSEST_H */

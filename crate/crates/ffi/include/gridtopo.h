#ifndef GRIDTOPO_H
#define GRIDTOPO_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GtStatus {
  GT_STATUS_OK = 0,
  GT_STATUS_NULL_POINTER = 1,
  GT_STATUS_INVALID_UTF8 = 2,
  GT_STATUS_PARSE = 3,
  GT_STATUS_VALIDATION = 4,
  GT_STATUS_UNDEFINED_METRIC = 5,
  /**
   * Degree fit impossible: empty variant, too few degrees or no decay.
   */
  GT_STATUS_FIT = 6,
  GT_STATUS_IO = 7,
  GT_STATUS_OUT_OF_RANGE = 8,
  GT_STATUS_PANIC = 99,
} GtStatus;

typedef enum GtVariant {
  GT_VARIANT_COMPLETE_HV = 0,
  GT_VARIANT_SIMPLIFIED_HV = 1,
  GT_VARIANT_TRANSMISSION = 2,
  GT_VARIANT_TRANSMISSION_SIMPLIFIED = 3,
} GtVariant;

typedef enum GtRemovalKind {
  GT_REMOVAL_KIND_NODE = 0,
  GT_REMOVAL_KIND_EDGE = 1,
} GtRemovalKind;

/**
 * Opaque graph handle.
 */
typedef struct GtGraph GtGraph;

/**
 * Opaque handle to the records of one removal scenario.
 */
typedef struct GtScenarioResult GtScenarioResult;

/**
 * Topological metrics of one graph. `omega` is NaN and `has_omega` false
 * when the lattice reference is undefined.
 */
typedef struct GtMetrics {
  size_t n_nodes;
  size_t n_edges;
  double density;
  double mean_degree;
  uint32_t diameter;
  double avg_path_length;
  double clustering;
  double modularity;
  double sigma;
  bool sigma_degenerate;
  double omega;
  bool has_omega;
  double efficiency;
  double share_110_150kv;
  double share_220_275kv;
  double share_330_400kv;
  double share_other;
} GtMetrics;

typedef struct GtGammaSuite {
  double complete_hv;
  double simplified_hv;
  double transmission;
  double transmission_simplified;
} GtGammaSuite;

/**
 * One Monte Carlo run. `clustering_drop` is NaN when the intact graph has
 * no triangles.
 */
typedef struct GtRunRecord {
  double edges_lost_share;
  size_t lcc_size;
  double eff_drop;
  double clustering_drop;
  bool has_clustering_drop;
} GtRunRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a
 * successful call. The pointer stays valid until the next `gt_*` call on
 * the same thread.
 */
const char *gt_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gt_version(void);

/**
 * Parse CSV edge-list text (`from,to,voltage_kv[,circuit_id]`).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum GtStatus gt_graph_parse(const char *text, struct GtGraph **out);

/**
 * Read and parse an edge-list file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum GtStatus gt_graph_load(const char *path, struct GtGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from this library that was not freed yet.
 */
void gt_graph_free(struct GtGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle; the outputs must be writable.
 */
enum GtStatus gt_graph_counts(const struct GtGraph *g, size_t *n_nodes, size_t *n_edges);

/**
 * New graph holding one of the four canonical variants of `g`.
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum GtStatus gt_graph_variant(const struct GtGraph *g,
                               enum GtVariant variant,
                               struct GtGraph **out);

/**
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum GtStatus gt_graph_metrics(const struct GtGraph *g, struct GtMetrics *out);

/**
 * Exponential decay constants of the four canonical variants.
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum GtStatus gt_graph_gamma_suite(const struct GtGraph *g, struct GtGammaSuite *out);

/**
 * Run one removal scenario: `runs` random removals of `fraction` of the
 * nodes or circuits, seeded by `master_seed`.
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum GtStatus gt_percolate(const struct GtGraph *g,
                           enum GtRemovalKind kind,
                           double fraction,
                           size_t runs,
                           uint64_t master_seed,
                           struct GtScenarioResult **out);

/**
 * # Safety
 * `r` must be null or a result handle that was not freed yet.
 */
void gt_result_free(struct GtScenarioResult *r);

/**
 * Number of runs and of elements removed per run.
 *
 * # Safety
 * `r` must be a live result handle; the outputs must be writable.
 */
enum GtStatus gt_result_counts(const struct GtScenarioResult *r,
                               size_t *runs,
                               size_t *removed_per_run);

/**
 * # Safety
 * `r` must be a live result handle and `out` writable.
 */
enum GtStatus gt_result_record(const struct GtScenarioResult *r,
                               size_t index,
                               struct GtRunRecord *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRIDTOPO_H */

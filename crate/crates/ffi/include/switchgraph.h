#ifndef SWITCHGRAPH_H
#define SWITCHGRAPH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SgStatus {
  SG_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SG_STATUS_NULL_POINTER = 1,
  /**
   * A parameter, vertex id, label or input file was rejected.
   */
  SG_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A file could not be read.
   */
  SG_STATUS_IO = 3,
  /**
   * `update` was called without a preceding `predict`.
   */
  SG_STATUS_PROTOCOL = 4,
  /**
   * The computation failed on valid input.
   */
  SG_STATUS_FAILED = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  SG_STATUS_PANIC = 6,
} SgStatus;

/**
 * Spanning-tree interval basis used by the cluster-specialist learner.
 */
typedef enum SgBasis {
  /**
   * All intervals of the spine; quadratic memory.
   */
  SG_BASIS_FULL = 0,
  /**
   * Dyadic intervals; logarithmic work per trial.
   */
  SG_BASIS_BINARY_TREE = 1,
} SgBasis;

/**
 * An undirected connected graph.
 */
typedef struct SgGraph SgGraph;

/**
 * An online learner over the vertices of a graph.
 */
typedef struct SgPredictor SgPredictor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *sg_last_error_message(void);

/**
 * Static description of an [`SgStatus`] value.
 */
const char *sg_status_name(int32_t status);

/**
 * Builds a graph on `n` vertices from `edge_count` pairs stored flat in
 * `edges` (`edges[2k]`, `edges[2k + 1]`). The graph must be connected.
 *
 * # Safety
 * `edges` must point to `2 * edge_count` readable values (it may be null
 * when `edge_count` is 0) and `out` must be writable.
 */
enum SgStatus sg_graph_new(size_t n,
                           const uint32_t *edges,
                           size_t edge_count,
                           struct SgGraph **out);

/**
 * Reads a graph from an edge-list file (`n=<count>` header, then one
 * 1-based `i j` pair per line).
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` must be writable.
 */
enum SgStatus sg_graph_from_file(const char *path, struct SgGraph **out);

/**
 * Vertex count of a graph, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t sg_graph_vertex_count(const struct SgGraph *graph);

/**
 * Edge count of a graph, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t sg_graph_edge_count(const struct SgGraph *graph);

/**
 * # Safety
 * `graph` must be null or a handle from `sg_graph_new`/`sg_graph_from_file`
 * that has not been freed.
 */
void sg_graph_free(struct SgGraph *graph);

/**
 * Writes the spine sampled with `seed` (a random spanning tree
 * linearized by depth-first search) into `order`, which must hold
 * `sg_graph_vertex_count(graph)` entries.
 *
 * # Safety
 * `graph` must be a live handle and `order` must point to `capacity`
 * writable values.
 */
enum SgStatus sg_sample_spine(const struct SgGraph *graph,
                              uint64_t seed,
                              uint32_t *order,
                              size_t capacity);

/**
 * Switching cluster specialists on a spine sampled from `graph` with
 * `seed`, over the [`SgBasis`] given by `basis`. A negative `alpha`
 * selects the time-varying rate `1 / (m + 1)` where `m` is the mistake
 * count; otherwise `alpha` must lie in `[0, 1]`.
 * The full basis is refused above 4096 vertices unless `allow_quadratic`
 * is non-zero.
 *
 * # Safety
 * `graph` must be a live handle and `out` must be writable.
 */
enum SgStatus sg_scs_new(const struct SgGraph *graph,
                         int32_t basis,
                         double alpha,
                         uint64_t seed,
                         int32_t allow_quadratic,
                         struct SgPredictor **out);

/**
 * Quasi-Bayes predictor with Ising coupling `theta` in `(0, 1/2)` and
 * switch probability `alpha` in `[0, 1)`, on a spine sampled with `seed`.
 *
 * # Safety
 * `graph` must be a live handle and `out` must be writable.
 */
enum SgStatus sg_qbayes_new(const struct SgGraph *graph,
                            double theta,
                            double alpha,
                            uint64_t seed,
                            struct SgPredictor **out);

/**
 * Projected kernel perceptron with the graph Laplacian kernel and norm
 * radius `gamma`. Builds a dense kernel, so memory is quadratic in the
 * vertex count.
 *
 * # Safety
 * `graph` must be a live handle and `out` must be writable.
 */
enum SgStatus sg_sgp_new(const struct SgGraph *graph, double gamma, struct SgPredictor **out);

/**
 * Predicts the label of `vertex` and writes it to `label`.
 *
 * # Safety
 * `predictor` must be a live handle and `label` must be writable.
 */
enum SgStatus sg_predict(struct SgPredictor *predictor, size_t vertex, int8_t *label);

/**
 * Reveals the true label of the last predicted vertex. When `mistake` is
 * non-null it receives 1 if the prediction was wrong and 0 otherwise.
 *
 * # Safety
 * `predictor` must be a live handle; `mistake` must be null or writable.
 */
enum SgStatus sg_update(struct SgPredictor *predictor, int8_t label, int32_t *mistake);

/**
 * Mistakes made so far, or 0 for a null handle.
 *
 * # Safety
 * `predictor` must be null or a live handle.
 */
uint64_t sg_mistakes(const struct SgPredictor *predictor);

/**
 * # Safety
 * `predictor` must be null or a handle from one of the `sg_*_new`
 * predictor constructors that has not been freed.
 */
void sg_predictor_free(struct SgPredictor *predictor);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWITCHGRAPH_H */

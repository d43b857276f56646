#ifndef CURVECLUST_H
#define CURVECLUST_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_INVALID_ARGUMENT = 1,
  CC_STATUS_DEGENERATE_INPUT = 2,
  CC_STATUS_GEOMETRY = 3,
  CC_STATUS_NUMERICAL_FAILURE = 4,
  CC_STATUS_FORMAT = 5,
  CC_STATUS_MISSING_DATA = 6,
  CC_STATUS_IO = 7,
  CC_STATUS_NULL_POINTER = 8,
  CC_STATUS_PANIC = 9,
} CcStatus;

typedef struct CcDataset CcDataset;

typedef struct CcGram CcGram;

typedef struct CcResult CcResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next curveclust call on the same thread.
 */
const char *cc_last_error(void);

/**
 * Loads a dataset from a `.csv` or `.json` file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CcStatus cc_dataset_load(const char *path, struct CcDataset **out);

/**
 * Progressively warped sine clusters (see the generator documentation).
 *
 * # Safety
 * `out` must be writable.
 */
enum CcStatus cc_dataset_sine(size_t clusters,
                              size_t per_cluster,
                              size_t samples,
                              double strength,
                              uint64_t seed,
                              struct CcDataset **out);

/**
 * # Safety
 * `d` must be a live dataset handle or null.
 */
size_t cc_dataset_len(const struct CcDataset *d);

/**
 * Copies the ground-truth labels into `labels` (length `len`); unlabelled
 * curves are a missing-data error.
 *
 * # Safety
 * `d` must be a live handle; `labels` must hold `len` writable elements.
 */
enum CcStatus cc_dataset_labels(const struct CcDataset *d, size_t *labels, size_t len);

/**
 * # Safety
 * `d` must come from this library and not have been freed.
 */
void cc_dataset_free(struct CcDataset *d);

/**
 * Builds the tangent-space Gram tensor of a dataset.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum CcStatus cc_gram_build(const struct CcDataset *d, struct CcGram **out);

/**
 * # Safety
 * `g` must be a live gram handle or null.
 */
size_t cc_gram_len(const struct CcGram *g);

/**
 * Entry `B^i_{jk}`.
 *
 * # Safety
 * `g` must be a live handle; `value` must be writable.
 */
enum CcStatus cc_gram_entry(const struct CcGram *g, size_t i, size_t j, size_t k, double *value);

/**
 * # Safety
 * `g` must come from this library and not have been freed.
 */
void cc_gram_free(struct CcGram *g);

/**
 * Solves the manifold low-rank problem on `g` and clusters into `k` groups.
 * `lambda <= 0` selects the default weight.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum CcStatus cc_cluster_clrr(const struct CcGram *g,
                              size_t k,
                              double lambda,
                              uint64_t seed,
                              struct CcResult **out);

/**
 * Euclidean baseline on the flattened curves. `lambda <= 0` selects the
 * default weight.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum CcStatus cc_cluster_lrr(const struct CcDataset *d,
                             size_t k,
                             double lambda,
                             uint64_t seed,
                             struct CcResult **out);

/**
 * # Safety
 * `r` must be a live result handle or null.
 */
size_t cc_result_len(const struct CcResult *r);

/**
 * # Safety
 * `r` must be a live handle; `labels` must hold `len` writable elements.
 */
enum CcStatus cc_result_labels(const struct CcResult *r, size_t *labels, size_t len);

/**
 * Copies the `N x N` affinity matrix, row-major, into `values`.
 *
 * # Safety
 * `r` must be a live handle; `values` must hold `len` writable elements.
 */
enum CcStatus cc_result_affinity(const struct CcResult *r, double *values, size_t len);

/**
 * Solver iterations, or 0 for a null handle.
 *
 * # Safety
 * `r` must be a live result handle or null.
 */
size_t cc_result_iterations(const struct CcResult *r);

/**
 * # Safety
 * `r` must be a live result handle or null.
 */
bool cc_result_converged(const struct CcResult *r);

/**
 * # Safety
 * `r` must come from this library and not have been freed.
 */
void cc_result_free(struct CcResult *r);

/**
 * Clustering accuracy in percent between two label arrays of length `n`.
 *
 * # Safety
 * `predicted` and `truth` must hold `n` readable elements; `out` must be
 * writable.
 */
enum CcStatus cc_sca(const size_t *predicted, const size_t *truth, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURVECLUST_H */

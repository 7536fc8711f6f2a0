#ifndef DSOM_H
#define DSOM_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Values for the `layout` argument of [`dsom_graph_new`].
 */
enum DsomLayout
#ifdef __cplusplus
  : uint32_t
#endif // __cplusplus
 {
  DSOM_LAYOUT_HEX = 0,
  DSOM_LAYOUT_RECT = 1,
};
#ifndef __cplusplus
typedef uint32_t DsomLayout;
#endif // __cplusplus

typedef enum {
  DSOM_STATUS_OK = 0,
  DSOM_STATUS_NULL_POINTER = 1,
  DSOM_STATUS_INVALID_ARGUMENT = 2,
  DSOM_STATUS_PARSE = 3,
  DSOM_STATUS_INVALID_MATRIX = 4,
  DSOM_STATUS_TOO_MANY_MODELS = 5,
  DSOM_STATUS_IO = 6,
  DSOM_STATUS_BUFFER_TOO_SMALL = 7,
  DSOM_STATUS_INTERNAL = 8,
} DsomStatus;

/**
 * Values for [`DsomEpochStats::update`].
 */
enum DsomSumsUpdate
#ifdef __cplusplus
  : uint32_t
#endif // __cplusplus
 {
  DSOM_SUMS_UPDATE_NONE = 0,
  DSOM_SUMS_UPDATE_FULL = 1,
  DSOM_SUMS_UPDATE_BLOCK = 2,
  DSOM_SUMS_UPDATE_INDIVIDUAL = 3,
};
#ifndef __cplusplus
typedef uint32_t DsomSumsUpdate;
#endif // __cplusplus

/**
 * Values for [`DsomTrainConfig::variant`].
 */
enum DsomVariant
#ifdef __cplusplus
  : uint32_t
#endif // __cplusplus
 {
  DSOM_VARIANT_BRUTE = 0,
  DSOM_VARIANT_PARTIAL = 1,
  DSOM_VARIANT_EARLY_STOP = 2,
  DSOM_VARIANT_MEMORY = 3,
  DSOM_VARIANT_FAST = 4,
};
#ifndef __cplusplus
typedef uint32_t DsomVariant;
#endif // __cplusplus

typedef struct DsomGraph DsomGraph;

typedef struct DsomMatrix DsomMatrix;

typedef struct DsomResult DsomResult;

/**
 * Training parameters. Fill with [`dsom_train_config_default`] and adjust.
 */
typedef struct {
  /**
   * A `DsomVariant` value.
   */
  uint32_t variant;
  size_t epochs;
  double sigma_initial;
  double sigma_final;
  double ratio;
  uint64_t seed;
} DsomTrainConfig;

typedef struct {
  size_t epoch;
  size_t nb_switch;
  /**
   * A `DsomSumsUpdate` value.
   */
  uint32_t update;
  uint64_t candidates_evaluated;
  uint64_t terms_accumulated;
} DsomEpochStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * successful one. Valid until the next `dsom_*` call on the same thread.
 */
const char *dsom_last_error(void);

/**
 * Matrix from `n * n` row-major values.
 *
 * # Safety
 * `values` must point to `n * n` readable doubles; `out` must be writable.
 */
DsomStatus dsom_matrix_from_values(size_t n, const double *values, DsomMatrix **out);

/**
 * Squared Euclidean matrix of `n` points of dimension `dim`, row-major.
 *
 * # Safety
 * `coords` must point to `n * dim` readable doubles; `out` must be writable.
 */
DsomStatus dsom_matrix_from_points(size_t n, size_t dim, const double *coords, DsomMatrix **out);

/**
 * Levenshtein matrix of `count` UTF-8 words, optionally normalized by the
 * longer length.
 *
 * # Safety
 * `words` must point to `count` valid NUL-terminated strings; `out` must be
 * writable.
 */
DsomStatus dsom_matrix_from_words(const char *const *words,
                                  size_t count,
                                  bool normalized,
                                  DsomMatrix **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
DsomStatus dsom_matrix_load(const char *path, DsomMatrix **out);

/**
 * # Safety
 * `matrix` must be a live handle and `path` a NUL-terminated string.
 */
DsomStatus dsom_matrix_save(const DsomMatrix *matrix, const char *path);

/**
 * New matrix with entries `round(scale * d)`.
 *
 * # Safety
 * `matrix` must be a live handle; `out` must be writable.
 */
DsomStatus dsom_matrix_integerize(const DsomMatrix *matrix, double scale, DsomMatrix **out);

/**
 * Number of observations, 0 for a null handle.
 *
 * # Safety
 * `matrix` must be null or a live handle.
 */
size_t dsom_matrix_size(const DsomMatrix *matrix);

/**
 * # Safety
 * `matrix` must be a live handle; `out` must be writable.
 */
DsomStatus dsom_matrix_get(const DsomMatrix *matrix, size_t i, size_t k, double *out);

/**
 * # Safety
 * `matrix` must be null or a handle not freed before.
 */
void dsom_matrix_free(DsomMatrix *matrix);

/**
 * Edit distance between two UTF-8 strings, counted in code points.
 *
 * # Safety
 * `a` and `b` must be NUL-terminated strings; `out` must be writable.
 */
DsomStatus dsom_levenshtein(const char *a, const char *b, size_t *out);

/**
 * `side x side` map; `layout` is a `DsomLayout` value.
 *
 * # Safety
 * `out` must be writable.
 */
DsomStatus dsom_graph_new(uint32_t layout, size_t side, DsomGraph **out);

/**
 * Number of models, 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t dsom_graph_models(const DsomGraph *graph);

/**
 * Shortest-path distance between two models, `UINT32_MAX` on bad input.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
uint32_t dsom_graph_distance(const DsomGraph *graph, size_t j, size_t k);

/**
 * # Safety
 * `graph` must be null or a handle not freed before.
 */
void dsom_graph_free(DsomGraph *graph);

/**
 * Defaults for `graph`: fast variant, 100 epochs, kernel width from half
 * the map diameter down to 0.5, ratio 7, seed 0.
 *
 * # Safety
 * `graph` must be a live handle; `out` must be writable.
 */
DsomStatus dsom_train_config_default(const DsomGraph *graph, DsomTrainConfig *out);

/**
 * # Safety
 * `matrix` and `graph` must be live handles, `config` readable and `out`
 * writable.
 */
DsomStatus dsom_train(const DsomMatrix *matrix,
                      const DsomGraph *graph,
                      const DsomTrainConfig *config,
                      DsomResult **out);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
size_t dsom_result_models(const DsomResult *result);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
size_t dsom_result_observations(const DsomResult *result);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
size_t dsom_result_epochs(const DsomResult *result);

/**
 * Quantization error, NaN for a null handle.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
double dsom_result_quantization_error(const DsomResult *result);

/**
 * Copies the prototype (observation index) of every model.
 *
 * # Safety
 * `result` must be a live handle and `out` writable for `len` entries.
 */
DsomStatus dsom_result_prototypes(const DsomResult *result, size_t *out, size_t len);

/**
 * Copies the model of every observation.
 *
 * # Safety
 * `result` must be a live handle and `out` writable for `len` entries.
 */
DsomStatus dsom_result_assignments(const DsomResult *result, size_t *out, size_t len);

/**
 * Statistics of epoch `index` (0-based).
 *
 * # Safety
 * `result` must be a live handle and `out` writable.
 */
DsomStatus dsom_result_epoch_stats(const DsomResult *result, size_t index, DsomEpochStats *out);

/**
 * # Safety
 * `result` must be null or a handle not freed before.
 */
void dsom_result_free(DsomResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DSOM_H */

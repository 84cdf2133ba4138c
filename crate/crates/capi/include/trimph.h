#ifndef TRIMPH_H
#define TRIMPH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every C-ABI call.
 */
typedef enum TrimphStatus {
  /**
   * Success.
   */
  TrimphOk = 0,
  /**
   * Invalid input data or parameters.
   */
  TrimphErrInput = 1,
  /**
   * A resource budget would be exceeded.
   */
  TrimphErrResource = 2,
  /**
   * A required pointer argument was null.
   */
  TrimphErrNullPointer = 3,
} TrimphStatus;

/**
 * An immutable point cloud (opaque).
 */
typedef struct TrimphCloud TrimphCloud;

/**
 * A persistence diagram (opaque).
 */
typedef struct TrimphDiagram TrimphDiagram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *trimph_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *trimph_version(void);

/**
 * Builds a cloud from `n_points` rows of `dim` doubles, row-major.
 *
 * # Safety
 * `coords` must point to `n_points * dim` readable doubles and `out` to a
 * writable pointer slot.
 */
enum TrimphStatus trimph_cloud_new(const double *coords,
                                   uintptr_t n_points,
                                   uintptr_t dim,
                                   struct TrimphCloud **out);

/**
 * Releases a cloud handle. Null is ignored.
 *
 * # Safety
 * `cloud` must be a pointer previously returned by this library.
 */
void trimph_cloud_free(struct TrimphCloud *cloud);

/**
 * Number of points in a cloud; 0 for null.
 *
 * # Safety
 * `cloud` must be a valid handle or null.
 */
uintptr_t trimph_cloud_len(const struct TrimphCloud *cloud);

/**
 * Asymmetric trimming by average pairwise distance. Writes the kept
 * original indices (ascending) into `kept_out` and their count into
 * `kept_len`.
 *
 * # Safety
 * `kept_out` must hold at least `kept_capacity` writable entries;
 * `kept_capacity` of at least the cloud size always suffices.
 */
enum TrimphStatus trimph_trim_asymmetric(const struct TrimphCloud *cloud,
                                         double alpha1,
                                         double alpha2,
                                         uintptr_t *kept_out,
                                         uintptr_t kept_capacity,
                                         uintptr_t *kept_len);

/**
 * One-sided trimming of the largest average pairwise distances.
 *
 * # Safety
 * As for [`trimph_trim_asymmetric`].
 */
enum TrimphStatus trimph_trim_one_sided(const struct TrimphCloud *cloud,
                                        double alpha,
                                        uintptr_t *kept_out,
                                        uintptr_t kept_capacity,
                                        uintptr_t *kept_len);

/**
 * The sub-cloud at the given indices (for chaining trim -> persistence).
 *
 * # Safety
 * `indices` must point to `len` readable entries; `out` to a writable slot.
 */
enum TrimphStatus trimph_cloud_select(const struct TrimphCloud *cloud,
                                      const uintptr_t *indices,
                                      uintptr_t len,
                                      struct TrimphCloud **out);

/**
 * Persistence diagram of the Rips filtration on a cloud, reported for
 * homology dimensions `0..=max_hom_dim`. A non-positive or non-finite
 * `threshold` selects the enclosing radius.
 *
 * # Safety
 * `out` must point to a writable pointer slot.
 */
enum TrimphStatus trimph_rips_persistence(const struct TrimphCloud *cloud,
                                          double threshold,
                                          uintptr_t max_hom_dim,
                                          struct TrimphDiagram **out);

/**
 * Releases a diagram handle. Null is ignored.
 *
 * # Safety
 * `dgm` must be a pointer previously returned by this library.
 */
void trimph_diagram_free(struct TrimphDiagram *dgm);

/**
 * Number of bars in a diagram; 0 for null.
 *
 * # Safety
 * `dgm` must be a valid handle or null.
 */
uintptr_t trimph_diagram_len(const struct TrimphDiagram *dgm);

/**
 * Reads bar `index`: homology dimension, birth, and death (positive
 * infinity for essential classes).
 *
 * # Safety
 * The three output pointers must be writable.
 */
enum TrimphStatus trimph_diagram_bar(const struct TrimphDiagram *dgm,
                                     uintptr_t index,
                                     uintptr_t *dim_out,
                                     double *birth_out,
                                     double *death_out);

/**
 * Bottleneck distance between two diagrams in one homology dimension.
 * Positive infinity when essential-class counts differ.
 *
 * # Safety
 * `out` must be writable.
 */
enum TrimphStatus trimph_bottleneck(const struct TrimphDiagram *a,
                                    const struct TrimphDiagram *b,
                                    uintptr_t dim,
                                    double *out);

/**
 * Hausdorff distance between two clouds of equal ambient dimension.
 *
 * # Safety
 * `out` must be writable.
 */
enum TrimphStatus trimph_hausdorff(const struct TrimphCloud *a,
                                   const struct TrimphCloud *b,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIMPH_H */

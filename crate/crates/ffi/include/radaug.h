/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef RADAUG_H
#define RADAUG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RadaugStatus {
  RADAUG_STATUS_OK = 0,
  RADAUG_STATUS_NULL_POINTER = 1,
  RADAUG_STATUS_INVALID_ARGUMENT = 2,
  RADAUG_STATUS_INVALID_INPUT = 3,
  RADAUG_STATUS_DEGENERATE = 4,
  RADAUG_STATUS_FORMAT = 5,
  RADAUG_STATUS_IO = 6,
  RADAUG_STATUS_BUFFER_TOO_SMALL = 7,
  RADAUG_STATUS_PANIC = 8,
} RadaugStatus;

/*
 Opaque dataset handle.
 */
typedef struct RadaugDataset RadaugDataset;

/*
 Opaque model handle.
 */
typedef struct RadaugModel RadaugModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer is
 valid until the next failing call on the same thread.
 */
const char *radaug_last_error(void);

/*
 Parameter count of the two-layer LSTM classifier.
 */
size_t radaug_count_params(size_t hidden, size_t classes);

/*
 Generates a dataset with default channel impairments.

 # Safety
 `classes` and `snr_grid` must be NUL-terminated strings; `out` must be
 writable.
 */
enum RadaugStatus radaug_dataset_generate(const char *classes,
                                          const char *snr_grid,
                                          size_t per_class,
                                          size_t seq_len,
                                          uint64_t seed,
                                          struct RadaugDataset **out);

/*
 # Safety
 `path` must be a NUL-terminated string; `out` must be writable.
 */
enum RadaugStatus radaug_dataset_load(const char *path, struct RadaugDataset **out);

/*
 # Safety
 `ds` must come from this library; `path` must be a NUL-terminated string.
 */
enum RadaugStatus radaug_dataset_save(const struct RadaugDataset *ds, const char *path);

/*
 Number of frames; 0 for a null handle.

 # Safety
 `ds` must be null or come from this library.
 */
size_t radaug_dataset_len(const struct RadaugDataset *ds);

/*
 Samples per frame; 0 for a null handle.

 # Safety
 `ds` must be null or come from this library.
 */
size_t radaug_dataset_seq_len(const struct RadaugDataset *ds);

/*
 Copies frame `index` as interleaved I/Q into `iq` (capacity `iq_len`
 floats) and writes its label and SNR.

 # Safety
 `ds` must come from this library; `iq` must hold `iq_len` floats;
 `label` and `snr_db` must be writable.
 */
enum RadaugStatus radaug_dataset_frame(const struct RadaugDataset *ds,
                                       size_t index,
                                       float *iq,
                                       size_t iq_len,
                                       uint8_t *label,
                                       int8_t *snr_db);

/*
 # Safety
 `ds` must be null or come from this library and not be used afterwards.
 */
void radaug_dataset_free(struct RadaugDataset *ds);

/*
 # Safety
 `path` must be a NUL-terminated string; `out` must be writable.
 */
enum RadaugStatus radaug_model_load(const char *path, struct RadaugModel **out);

/*
 Number of output classes; 0 for a null handle.

 # Safety
 `model` must be null or come from this library.
 */
size_t radaug_model_num_classes(const struct RadaugModel *model);

/*
 Classifies one raw frame of `n_samples` interleaved I/Q pairs.

 # Safety
 `model` must come from this library; `iq` must hold `2 * n_samples`
 floats; `probs` must hold `probs_len` doubles; `class_out` may be null.
 */
enum RadaugStatus radaug_model_predict(const struct RadaugModel *model,
                                       const float *iq,
                                       size_t n_samples,
                                       double *probs,
                                       size_t probs_len,
                                       size_t *class_out);

/*
 Test-time augmented prediction with a named policy
 (`none|rotation|flip|noise|joint`); `seed` drives noise draws.

 # Safety
 As [`radaug_model_predict`]; `policy` must be a NUL-terminated string.
 */
enum RadaugStatus radaug_model_predict_tta(const struct RadaugModel *model,
                                           const float *iq,
                                           size_t n_samples,
                                           const char *policy,
                                           uint64_t seed,
                                           double *probs,
                                           size_t probs_len,
                                           size_t *class_out);

/*
 # Safety
 `model` must be null or come from this library and not be used afterwards.
 */
void radaug_model_free(struct RadaugModel *model);

/*
 Scale factor N of a named policy, or 0 for an unknown name.

 # Safety
 `policy` must be a NUL-terminated string.
 */
size_t radaug_policy_scale_factor(const char *policy);

/*
 Writes every variant of one frame under a named policy, in policy order,
 as `N * 2 * n_samples` interleaved floats.

 # Safety
 `iq` must hold `2 * n_samples` floats; `out` must hold `out_len` floats;
 `policy` must be a NUL-terminated string.
 */
enum RadaugStatus radaug_augment_frame(const float *iq,
                                       size_t n_samples,
                                       const char *policy,
                                       uint64_t seed,
                                       float *out,
                                       size_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADAUG_H */

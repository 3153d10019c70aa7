#ifndef CYCLIC_INPAINT_H
#define CYCLIC_INPAINT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CipStatus {
  CIP_STATUS_OK = 0,
  CIP_STATUS_INVALID_ARGUMENT = 1,
  CIP_STATUS_NULL_POINTER = 2,
  CIP_STATUS_SHAPE_MISMATCH = 3,
  CIP_STATUS_OUT_OF_RANGE = 4,
  CIP_STATUS_IO = 5,
  CIP_STATUS_FORMAT = 6,
  CIP_STATUS_NUMERICAL = 7,
  CIP_STATUS_PANIC = 8,
} CipStatus;

// Phase image with values in `[-pi, pi)`, row-major.
typedef struct CipImage CipImage;

// Known/unknown pixel mask.
typedef struct CipMask CipMask;

// Result of a solver run: final image and energy trace.
typedef struct CipReport CipReport;

typedef struct CipSolverConfig {
  double lambda0;
  size_t max_sweeps;
  // 0 records only the first and last energy.
  size_t record_energy_every;
  bool parallel;
  // Data-fidelity model instead of exact interpolation.
  bool noisy;
} CipSolverConfig;

// Regularizer weights; all nonnegative, at least one positive.
typedef struct CipWeights {
  // Horizontal, vertical, diagonal, anti-diagonal first-order weights.
  double alpha[4];
  // Horizontal, vertical second-order weights.
  double beta[2];
  // Mixed second-order weight.
  double gamma;
} CipWeights;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after success.
// The pointer stays valid until the next call on this thread.
const char *cip_last_error(void);

// Defaults: lambda0 = pi/2, 700 sweeps, energy every sweep, parallel, noiseless.
struct CipSolverConfig cip_solver_config_default(void);

// Copies `rows * cols` values from `data`; values must lie in `[-pi, pi)`.
//
// # Safety
// `data` must point to `rows * cols` readable doubles; `out` must be writable.
enum CipStatus cip_image_new(size_t rows, size_t cols, const double *data, struct CipImage **out);

// # Safety
// `image` must be null or a handle from this library not yet freed.
void cip_image_free(struct CipImage *image);

// # Safety
// `image` must be a live handle or null (returns 0).
size_t cip_image_rows(const struct CipImage *image);

// # Safety
// `image` must be a live handle or null (returns 0).
size_t cip_image_cols(const struct CipImage *image);

// Copies the pixels into `out`, which holds `len >= rows * cols` doubles.
//
// # Safety
// `out` must point to `len` writable doubles.
enum CipStatus cip_image_copy(const struct CipImage *image, double *out, size_t len);

// `known[i] != 0` marks pixel `i` (row-major) as known.
//
// # Safety
// `known` must point to `rows * cols` readable bytes; `out` must be writable.
enum CipStatus cip_mask_new(size_t rows, size_t cols, const uint8_t *known, struct CipMask **out);

// # Safety
// `mask` must be null or a handle from this library not yet freed.
void cip_mask_free(struct CipMask *mask);

// # Safety
// `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
enum CipStatus cip_read_phase(const char *path, struct CipImage **out);

// # Safety
// `path` must be a NUL-terminated UTF-8 string; `image` a live handle.
enum CipStatus cip_write_phase(const char *path, const struct CipImage *image);

// # Safety
// `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
enum CipStatus cip_read_mask(const char *path, struct CipMask **out);

// Fills unknown pixels of `f` by zero-difference extrapolation.
//
// # Safety
// Handles must be live; `weights` readable; `out` writable.
enum CipStatus cip_initialize(const struct CipImage *f,
                              const struct CipMask *mask,
                              const struct CipWeights *weights_,
                              struct CipImage **out);

// Runs initialization (noiseless) or starts from `f` (noisy), then the
// cyclic proximal point iteration.
//
// # Safety
// Handles must be live; `weights` and `config` readable; `out` writable.
enum CipStatus cip_inpaint(const struct CipImage *f,
                           const struct CipMask *mask,
                           const struct CipWeights *weights_,
                           const struct CipSolverConfig *config,
                           struct CipReport **out);

// # Safety
// `report` must be null or a handle from this library not yet freed.
void cip_report_free(struct CipReport *report);

// New image handle holding a copy of the final image.
//
// # Safety
// `report` must be live; `out` writable.
enum CipStatus cip_report_image(const struct CipReport *report, struct CipImage **out);

// Number of recorded energy samples.
//
// # Safety
// `report` must be a live handle or null (returns 0).
size_t cip_report_trace_len(const struct CipReport *report);

// Copies up to `len` trace samples; either output may be null.
//
// # Safety
// Non-null outputs must point to `len` writable elements.
enum CipStatus cip_report_trace(const struct CipReport *report,
                                size_t *sweeps,
                                double *energies,
                                size_t len);

// # Safety
// Handles must be live; `weights` readable; `out` writable.
enum CipStatus cip_energy(const struct CipImage *x,
                          const struct CipImage *f,
                          const struct CipMask *mask,
                          const struct CipWeights *weights_,
                          bool noisy,
                          double *out);

// Mean squared and maximum geodesic distance between two images.
//
// # Safety
// Handles must be live; outputs writable.
enum CipStatus cip_cyclic_error(const struct CipImage *x,
                                const struct CipImage *y,
                                double *mse,
                                double *max);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CYCLIC_INPAINT_H */

#ifndef SPARSE_SAR_H
#define SPARSE_SAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SSAR_OK 0

#define SSAR_ERR_NULL -1

#define SSAR_ERR_INVALID -2

#define SSAR_ERR_SHAPE -3

#define SSAR_ERR_BUDGET -4

#define SSAR_ERR_DIVERGED -5

#define SSAR_ERR_IO -6

#define SSAR_ERR_PANIC -7

#define SSAR_ERR_UTF8 -8

typedef struct SsarEcho SsarEcho;

// Radar configuration with its matched scene grid.
typedef struct SsarRadar SsarRadar;

typedef struct SsarResult SsarResult;

typedef struct SsarScene SsarScene;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or an empty string. The
// pointer stays valid until the next failing call on the same thread.
const char *ssar_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ssar_version(void);

// Look up a named preset ("desk-small", "desk", "tianjin-c-band").
//
// # Safety
// `name` must be NUL-terminated; `out` must be writable.
int32_t ssar_radar_preset(const char *name, struct SsarRadar **out);

// Scene grid shape of `radar`.
//
// # Safety
// `radar` must be a live handle; `rows` and `cols` must be writable.
int32_t ssar_radar_scene_shape(const struct SsarRadar *radar, size_t *rows, size_t *cols);

// Full-rate echo shape (pulses, range bins) of `radar`.
//
// # Safety
// `radar` must be a live handle; `pulses` and `bins` must be writable.
int32_t ssar_radar_echo_shape(const struct SsarRadar *radar, size_t *pulses, size_t *bins);

// # Safety
// `radar` must be NULL or a handle not yet freed.
void ssar_radar_free(struct SsarRadar *radar);

// Scene with `strong_cells` random cells of magnitude in
// `[amplitude_min, amplitude_max]` and uniform phase.
//
// # Safety
// `radar` must be a live handle; `out` must be writable.
int32_t ssar_scene_random(const struct SsarRadar *radar,
                          size_t strong_cells,
                          double amplitude_min,
                          double amplitude_max,
                          uint64_t seed,
                          struct SsarScene **out);

// Scene on the grid of `radar` from `len` interleaved complex values.
//
// # Safety
// `data` must hold `2 * len` doubles; `out` must be writable.
int32_t ssar_scene_from_buffer(const struct SsarRadar *radar,
                               const double *data,
                               size_t len,
                               struct SsarScene **out);

// Number of cells of `scene`.
//
// # Safety
// `scene` must be a live handle; `len` must be writable.
int32_t ssar_scene_len(const struct SsarScene *scene, size_t *len);

// Copy the reflectivity into `out`, which must hold exactly `len` values.
//
// # Safety
// `scene` must be a live handle; `out` must hold `2 * len` doubles.
int32_t ssar_scene_copy(const struct SsarScene *scene, double *out, size_t len);

// # Safety
// `scene` must be NULL or a handle not yet freed.
void ssar_scene_free(struct SsarScene *scene);

// Simulate a jittered under-sampled acquisition. `alpha` is the azimuth
// rate factor, `jitter_fraction` the jitter width as a fraction of its
// ordering bound `1 / (2 alpha prf)`, `range_ratio` the fraction of range
// bins kept. An infinite `snr_db` gives noiseless data.
//
// # Safety
// `radar` and `scene` must be live handles; `out` must be writable.
int32_t ssar_simulate_jittered(const struct SsarRadar *radar,
                               const struct SsarScene *scene,
                               double alpha,
                               double jitter_fraction,
                               double range_ratio,
                               double snr_db,
                               uint64_t seed,
                               struct SsarEcho **out);

// Number of acquired samples in `echo`.
//
// # Safety
// `echo` must be a live handle; `count` must be writable.
int32_t ssar_echo_acquired(const struct SsarEcho *echo, size_t *count);

// # Safety
// `echo` must be NULL or a handle not yet freed.
void ssar_echo_free(struct SsarEcho *echo);

// Reconstruct the scene from `echo` with `l_q` shrinkage. The
// regularization weight is `lambda_fraction * max |Phi^H y|`. `fast`
// selects the FFT-based operator instead of the exact matrix.
//
// # Safety
// `radar` and `echo` must be live handles; `out` must be writable.
int32_t ssar_reconstruct(const struct SsarRadar *radar,
                         const struct SsarEcho *echo,
                         double q,
                         double lambda_fraction,
                         size_t max_iters,
                         bool fast,
                         struct SsarResult **out);

// Copy the estimate into `out`, which must hold exactly `len` values.
//
// # Safety
// `result` must be a live handle; `out` must hold `2 * len` doubles.
int32_t ssar_result_estimate(const struct SsarResult *result, double *out, size_t len);

// # Safety
// `result` must be a live handle; `iterations` must be writable.
int32_t ssar_result_iterations(const struct SsarResult *result, size_t *iterations);

// Final data residual `||y - Phi x||`.
//
// # Safety
// `result` must be a live handle; `residual` must be writable.
int32_t ssar_result_residual(const struct SsarResult *result, double *residual);

// Mean squared error of the estimate against `truth`, after removing a
// common phase.
//
// # Safety
// `result` and `truth` must be live handles; `value` must be writable.
int32_t ssar_result_mse(const struct SsarResult *result,
                        const struct SsarScene *truth,
                        double *value);

// # Safety
// `result` must be NULL or a handle not yet freed.
void ssar_result_free(struct SsarResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPARSE_SAR_H */

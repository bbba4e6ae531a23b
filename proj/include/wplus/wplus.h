/*
 * wplus C API.
 *
 * Every object is an opaque handle owned by the caller and released with the
 * matching *_free function. Functions return a wplus_status; on failure the
 * message is available from wplus_last_error() on the calling thread until the
 * next failing call on that thread. Output handles are written only on success.
 */
#ifndef WPLUS_WPLUS_H
#define WPLUS_WPLUS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(WPLUS_BUILDING_LIBRARY)
#    define WPLUS_API __declspec(dllexport)
#  else
#    define WPLUS_API __declspec(dllimport)
#  endif
#else
#  define WPLUS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wplus_status {
  WPLUS_OK = 0,
  WPLUS_ERR_INVALID_ARGUMENT = 1,
  WPLUS_ERR_SHAPE_MISMATCH = 2,
  WPLUS_ERR_IO = 3,
  WPLUS_ERR_FORMAT = 4,
  WPLUS_ERR_NUMERIC = 5,
  WPLUS_ERR_INTERNAL = 6
} wplus_status;

typedef struct wplus_generator wplus_generator;
typedef struct wplus_extractor wplus_extractor;
typedef struct wplus_latent wplus_latent;
typedef struct wplus_image wplus_image;
typedef struct wplus_embed_result wplus_embed_result;
typedef struct wplus_report wplus_report;

WPLUS_API const char* wplus_last_error(void);
WPLUS_API const char* wplus_status_string(wplus_status status);
WPLUS_API const char* wplus_version(void);

/* Deterministic mode. Initialized from the WPLUS_DETERMINISTIC environment
 * variable ("0" disables, anything else enables; default enabled). In
 * deterministic mode suites run their conditions on one thread and reported
 * wallclock times are zero. */
WPLUS_API void wplus_set_deterministic(int enabled);
WPLUS_API int wplus_is_deterministic(void);

/* ---- generator --------------------------------------------------------- */

typedef struct wplus_generator_config {
  uint32_t resolution;
  uint32_t style_dim;
  uint32_t mapping_layers;
  uint32_t base_channels;
  uint32_t channel_cap;
  uint64_t seed;
} wplus_generator_config;

WPLUS_API void wplus_generator_config_init(wplus_generator_config* config);
WPLUS_API wplus_status wplus_generator_create_toy(const wplus_generator_config* config, wplus_generator** out);
WPLUS_API wplus_status wplus_generator_load(const char* path, wplus_generator** out);
WPLUS_API wplus_status wplus_generator_save(const wplus_generator* generator, const char* path);
WPLUS_API void wplus_generator_free(wplus_generator* generator);
WPLUS_API wplus_status wplus_generator_get_config(const wplus_generator* generator, wplus_generator_config* out);
WPLUS_API size_t wplus_generator_num_layers(const wplus_generator* generator);
WPLUS_API size_t wplus_generator_style_dim(const wplus_generator* generator);
WPLUS_API uint64_t wplus_generator_checksum(const wplus_generator* generator);

/* Broadcast of the mean mapped style over `samples` seeded Gaussian draws. */
WPLUS_API wplus_status wplus_mean_latent(const wplus_generator* generator, size_t samples, uint64_t seed,
                                         wplus_latent** out);
/* Maps one z (style_dim values) and broadcasts it to every layer. */
WPLUS_API wplus_status wplus_map_latent(const wplus_generator* generator, const double* z, size_t dim,
                                        wplus_latent** out);
WPLUS_API wplus_status wplus_synthesize(const wplus_generator* generator, const wplus_latent* latent,
                                        wplus_image** out);

/* ---- feature extractor ------------------------------------------------- */

typedef struct wplus_extractor_config {
  uint32_t widths[4];
  uint64_t seed;
} wplus_extractor_config;

WPLUS_API void wplus_extractor_config_init(wplus_extractor_config* config);
WPLUS_API wplus_status wplus_extractor_create_random(const wplus_extractor_config* config, wplus_extractor** out);
WPLUS_API wplus_status wplus_extractor_load(const char* path, wplus_extractor** out);
WPLUS_API wplus_status wplus_extractor_save(const wplus_extractor* extractor, const char* path);
WPLUS_API void wplus_extractor_free(wplus_extractor* extractor);

/* ---- latents ----------------------------------------------------------- */

WPLUS_API wplus_status wplus_latent_create(size_t layers, size_t dim, const double* values, wplus_latent** out);
WPLUS_API wplus_status wplus_latent_clone(const wplus_latent* latent, wplus_latent** out);
WPLUS_API wplus_status wplus_latent_read(const char* path, wplus_latent** out);
WPLUS_API wplus_status wplus_latent_write(const wplus_latent* latent, const char* path);
WPLUS_API void wplus_latent_free(wplus_latent* latent);
WPLUS_API size_t wplus_latent_layers(const wplus_latent* latent);
WPLUS_API size_t wplus_latent_dim(const wplus_latent* latent);
/* Row-major L·D values, valid until the handle is freed. */
WPLUS_API const double* wplus_latent_data(const wplus_latent* latent);
/* Copy rounded to float32, the precision a latent file stores. */
WPLUS_API wplus_status wplus_latent_quantize(const wplus_latent* latent, wplus_latent** out);

WPLUS_API wplus_status wplus_interpolate(const wplus_latent* a, const wplus_latent* b, double lambda,
                                         wplus_latent** out);
WPLUS_API size_t wplus_default_split(size_t layers);
WPLUS_API wplus_status wplus_crossover(const wplus_latent* content, const wplus_latent* style, size_t split,
                                       wplus_latent** out);
/* Thresholded (optionally normalized) direction expressive − neutral. */
WPLUS_API wplus_status wplus_expression_direction(const wplus_latent* neutral, const wplus_latent* expressive,
                                                  double threshold, int normalize, wplus_latent** out);
WPLUS_API wplus_status wplus_apply_expression(const wplus_latent* target, const wplus_latent* direction,
                                              double lambda, wplus_latent** out);
WPLUS_API wplus_status wplus_latent_distance(const wplus_latent* a, const wplus_latent* b, double* out);
/* Writes the labelled symmetric distance matrix as CSV. */
WPLUS_API wplus_status wplus_pairwise_distances_csv(const wplus_latent* const* latents, const char* const* labels,
                                                    size_t count, const char* path);

/* Fills out[0..frames) with new image handles; frame 0 is b, the last is a. */
WPLUS_API wplus_status wplus_morph_sequence(const wplus_generator* generator, const wplus_latent* a,
                                            const wplus_latent* b, size_t frames, wplus_image** out);

/* ---- images ------------------------------------------------------------ */

WPLUS_API wplus_status wplus_image_create(size_t side, const double* pixels, wplus_image** out);
WPLUS_API wplus_status wplus_image_read_png(const char* path, wplus_image** out);
/* 8-bit RGB, round(clamp(x,0,1)·255). */
WPLUS_API wplus_status wplus_image_write_png(const wplus_image* image, const char* path);
WPLUS_API void wplus_image_free(wplus_image* image);
WPLUS_API size_t wplus_image_side(const wplus_image* image);
/* Row-major interleaved RGB, side·side·3 values. */
WPLUS_API const double* wplus_image_data(const wplus_image* image);

/* ---- embedding --------------------------------------------------------- */

typedef enum wplus_init { WPLUS_INIT_MEAN = 0, WPLUS_INIT_RANDOM = 1, WPLUS_INIT_PROVIDED = 2 } wplus_init;
typedef enum wplus_space { WPLUS_SPACE_WPLUS = 0, WPLUS_SPACE_W = 1, WPLUS_SPACE_Z = 2 } wplus_space;

typedef struct wplus_embed_config {
  wplus_init init;
  wplus_space space;
  size_t steps;
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  double lambda_mse;
  double lambda_stage[4];
  uint32_t loss_resolution;
  uint64_t seed;
  size_t record_every;
  size_t mean_samples;
  uint64_t mean_seed;
  /* Required for WPLUS_INIT_PROVIDED; borrowed, not owned. */
  const wplus_latent* provided;
} wplus_embed_config;

/* Defaults: mean init, W+, 5000 steps, lr 0.01, betas 0.9/0.999, eps 1e-8,
 * all lambdas 1, loss resolution 256, record every 10 steps, 10000 mean samples. */
WPLUS_API void wplus_embed_config_init(wplus_embed_config* config);

WPLUS_API wplus_status wplus_embed(const wplus_generator* generator, const wplus_extractor* extractor,
                                   const wplus_image* target, const wplus_embed_config* config,
                                   wplus_embed_result** out);
WPLUS_API void wplus_embed_result_free(wplus_embed_result* result);
WPLUS_API wplus_status wplus_embed_result_latent(const wplus_embed_result* result, wplus_latent** out);
WPLUS_API wplus_status wplus_embed_result_losses(const wplus_embed_result* result, double* total, double* percept,
                                                 double* mse, double* dist_to_mean);
WPLUS_API size_t wplus_embed_result_best_step(const wplus_embed_result* result);
WPLUS_API double wplus_embed_result_wallclock(const wplus_embed_result* result);
WPLUS_API size_t wplus_embed_result_trace_size(const wplus_embed_result* result);
WPLUS_API wplus_status wplus_embed_result_trace_sample(const wplus_embed_result* result, size_t index,
                                                       size_t* step, double* total, double* percept, double* mse,
                                                       double* dist_to_mean);
/* CSV header: step,total,percept,mse,dist_to_mean,best_so_far */
WPLUS_API wplus_status wplus_embed_result_write_trace(const wplus_embed_result* result, const char* path);

/* ---- stress protocols -------------------------------------------------- */

typedef enum wplus_affine_kind {
  WPLUS_AFFINE_TRANSLATE_RIGHT = 0,
  WPLUS_AFFINE_TRANSLATE_LEFT = 1,
  WPLUS_AFFINE_ZOOM_IN = 2,
  WPLUS_AFFINE_ZOOM_OUT = 3,
  WPLUS_AFFINE_ROTATE = 4
} wplus_affine_kind;

typedef struct wplus_affine_spec {
  wplus_affine_kind kind;
  double magnitude;
} wplus_affine_spec;

typedef struct wplus_defect_rect {
  size_t x, y, width, height;
} wplus_defect_rect;

typedef struct wplus_defect_condition {
  const char* label;
  const wplus_defect_rect* rects;
  size_t rect_count;
  double fill;
} wplus_defect_condition;

/* Writes the six reference transforms (scaled to resolution) into out[0..6). */
WPLUS_API size_t wplus_reference_affine_protocol(size_t resolution, wplus_affine_spec* out, size_t capacity);
WPLUS_API wplus_status wplus_apply_affine(const wplus_image* image, wplus_affine_spec spec, wplus_image** out);
WPLUS_API wplus_status wplus_apply_defects(const wplus_image* image, const wplus_defect_rect* rects, size_t count,
                                           double fill, wplus_image** out);

WPLUS_API wplus_status wplus_run_affine_suite(const wplus_generator* generator, const wplus_extractor* extractor,
                                              const wplus_image* image, const wplus_embed_config* config,
                                              const wplus_affine_spec* specs, size_t count, size_t jobs,
                                              wplus_report** out);
WPLUS_API wplus_status wplus_run_defect_suite(const wplus_generator* generator, const wplus_extractor* extractor,
                                              const wplus_image* image, const wplus_embed_config* config,
                                              const wplus_defect_condition* conditions, size_t count, size_t jobs,
                                              wplus_report** out);
WPLUS_API wplus_status wplus_run_iterative_suite(const wplus_generator* generator, const wplus_extractor* extractor,
                                                 const wplus_image* image, const wplus_embed_config* config,
                                                 size_t rounds, wplus_report** out);
WPLUS_API wplus_status wplus_run_init_comparison(const wplus_generator* generator, const wplus_extractor* extractor,
                                                 const wplus_image* const* images, const char* const* labels,
                                                 size_t count, const wplus_embed_config* config, size_t jobs,
                                                 wplus_report** out);

WPLUS_API void wplus_report_free(wplus_report* report);
WPLUS_API size_t wplus_report_rows(const wplus_report* report);
/* `condition` stays valid until the report is freed. */
WPLUS_API wplus_status wplus_report_row(const wplus_report* report, size_t index, const char** condition,
                                        double* loss_total, double* dist_to_mean);
WPLUS_API const char* wplus_report_config_hash(const wplus_report* report);
/* CSV header: condition,loss_total,loss_total_x1e5,dist_to_mean,steps,seed */
WPLUS_API wplus_status wplus_report_write_csv(const wplus_report* report, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* WPLUS_WPLUS_H */

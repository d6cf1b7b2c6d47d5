/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the raisr shared library.
 *
 * Every function returns a raisr_status. On failure a message is available
 * from raisr_last_error() until the next call on the same thread. Handles are
 * opaque and owned by the caller; release them with the matching _free.
 * Strings returned through out-parameters are released with raisr_string_free.
 */

#ifndef RAISR_RAISR_H
#define RAISR_RAISR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RAISR_API __declspec(dllexport)
#else
#define RAISR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum raisr_status {
  RAISR_OK = 0,
  RAISR_ERR_USAGE = 1,    /* invalid argument or configuration */
  RAISR_ERR_IO = 2,       /* unreadable/unwritable file, corrupt bank */
  RAISR_ERR_NUMERIC = 3,  /* NaN/Inf during a numerical routine */
  RAISR_ERR_INTERNAL = 4  /* unexpected failure; the CLI maps this to 3 */
} raisr_status;

typedef enum raisr_kernel { RAISR_NEAREST = 0, RAISR_BILINEAR = 1, RAISR_BICUBIC = 2 } raisr_kernel;
typedef enum raisr_blend { RAISR_BLEND_NONE = 0, RAISR_BLEND_RANDOMNESS = 1, RAISR_BLEND_HAMMING = 2 } raisr_blend;
typedef enum raisr_mode { RAISR_MODE_SISR = 0, RAISR_MODE_ENHANCE = 1 } raisr_mode;

typedef struct raisr_image raisr_image;
typedef struct raisr_bank raisr_bank;

RAISR_API const char* raisr_last_error(void);
RAISR_API const char* raisr_version(void);
RAISR_API void raisr_string_free(char* s);

/* ---- Images: 1 (gray) or 3 (RGB) channels, values in [0,255] ---- */

RAISR_API raisr_status raisr_image_load(const char* path, raisr_image** out);
RAISR_API raisr_status raisr_image_save(const raisr_image* img, const char* path);
/* Interleaved 8-bit pixels, row-major. */
RAISR_API raisr_status raisr_image_from_u8(const uint8_t* pixels, int width, int height, int channels,
                                           raisr_image** out);
RAISR_API raisr_status raisr_image_to_u8(const raisr_image* img, uint8_t* pixels, size_t capacity);
RAISR_API void raisr_image_free(raisr_image* img);
RAISR_API int raisr_image_width(const raisr_image* img);
RAISR_API int raisr_image_height(const raisr_image* img);
RAISR_API int raisr_image_channels(const raisr_image* img);

/* ---- Filter banks ---- */

typedef struct raisr_bank_info {
  int scale;
  int filter_dim;
  int angle_bins;
  int strength_bins;
  int coherence_bins;
  int pixel_types;
} raisr_bank_info;

RAISR_API raisr_status raisr_bank_load(const char* path, raisr_bank** out);
RAISR_API raisr_status raisr_bank_save(const raisr_bank* bank, const char* path);
RAISR_API raisr_status raisr_bank_info_get(const raisr_bank* bank, raisr_bank_info* out);
RAISR_API void raisr_bank_free(raisr_bank* bank);

/* ---- Training ---- */

#define RAISR_MAX_THRESHOLDS 16

typedef struct raisr_train_options {
  int scale;
  int filter_dim;
  int angle_bins;
  int strength_bins;
  int coherence_bins;
  double strength_thresholds[RAISR_MAX_THRESHOLDS]; /* strength_bins - 1 used */
  double coherence_thresholds[RAISR_MAX_THRESHOLDS];
  int stride;
  double ridge;
  int symmetry;             /* 0 off, 1 on */
  const char* sharpen;      /* target sharpening: preset name, layer list or NULL */
  int compress_quality;     /* JPEG quality for the LR images, <0 for none */
  raisr_kernel initial;
  int threads;
  const char* workdir;      /* scratch for codec round trips or NULL */
} raisr_train_options;

/* Fills the defaults of the given mode. */
RAISR_API void raisr_train_options_init(raisr_train_options* opts, raisr_mode mode);
/* report_json may be NULL. */
RAISR_API raisr_status raisr_train(const char* corpus_dir, const raisr_train_options* opts, raisr_bank** out,
                                   char** report_json);

/* ---- Upscaling ---- */

typedef struct raisr_upscale_options {
  raisr_kernel initial;
  raisr_blend blend;
  double ct_threshold;
  int blend_smooth;
  int back_projection_iters; /* 0 disables */
  double back_projection_step;
  int threads;
} raisr_upscale_options;

typedef struct raisr_timings {
  double initial, hashing, filtering, blending, back_projection; /* seconds */
} raisr_timings;

RAISR_API void raisr_upscale_options_init(raisr_upscale_options* opts, raisr_mode mode);
/* timings may be NULL. */
RAISR_API raisr_status raisr_upscale(const raisr_image* lr, const raisr_bank* bank, const raisr_upscale_options* opts,
                                     raisr_image** out, raisr_timings* timings);
/* Cheap interpolation only. */
RAISR_API raisr_status raisr_interpolate(const raisr_image* lr, int scale, raisr_kernel kernel, raisr_image** out);
/* Blend weights of the luma upscale as a [0,255] gray image. */
RAISR_API raisr_status raisr_blend_map(const raisr_image* lr, const raisr_bank* bank,
                                       const raisr_upscale_options* opts, raisr_image** out);

/* ---- Sharpening ---- */

/* Either a preset name ("detail", "contrast") or a "sigma:rho:mode,..." list. */
RAISR_API raisr_status raisr_sharpen(const raisr_image* img, const char* preset, const char* layers,
                                     double ct_threshold, raisr_image** out);

/* ---- Evaluation and inspection ---- */

/* lr_dir may be NULL. Both output strings may be NULL. */
RAISR_API raisr_status raisr_evaluate(const char* hr_dir, const char* lr_dir, const raisr_bank* bank,
                                      const raisr_upscale_options* opts, char** json, char** table);

/* Writes one grid image per pixel type; paths get a _t<k> suffix when the
 * bank has more than one pixel type. */
RAISR_API raisr_status raisr_dump_filters(const raisr_bank* bank, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* RAISR_RAISR_H */

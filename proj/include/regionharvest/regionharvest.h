/*
 * regionharvest C API.
 *
 * Every function that can fail returns an rh_status; on failure a message
 * for the calling thread is available from rh_last_error() until the next
 * failing call on that thread. Handles are opaque and owned by the caller,
 * who releases them with the matching *_destroy function.
 */
#ifndef REGIONHARVEST_H
#define REGIONHARVEST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RH_BUILDING_LIBRARY)
#    define RH_API __declspec(dllexport)
#  else
#    define RH_API __declspec(dllimport)
#  endif
#else
#  define RH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rh_status {
  RH_OK = 0,
  RH_ERR_INVALID_ARGUMENT = 1,
  RH_ERR_IO = 2,
  RH_ERR_MISSING_FILE = 3,
  RH_ERR_UNREADABLE_IMAGE = 4,
  RH_ERR_EMPTY_MANIFEST = 5,
  RH_ERR_MALFORMED_MANIFEST = 6,
  RH_ERR_PRECONDITION = 7,
  RH_ERR_PHASE_ORDER = 8,
  RH_ERR_INTERNAL = 9
} rh_status;

RH_API const char* rh_version(void);
RH_API const char* rh_status_name(rh_status status);
RH_API const char* rh_last_error(void);

/* Library-owned text. */
typedef struct rh_text rh_text;
RH_API const char* rh_text_data(const rh_text* text);
RH_API size_t rh_text_size(const rh_text* text);
RH_API void rh_text_destroy(rh_text* text);

/* ---------------------------------------------------------------------- */
/* Experiment configuration: flat keys such as "enhanced.hmcr" or "seed". */
/* ---------------------------------------------------------------------- */

typedef struct rh_config rh_config;

RH_API rh_status rh_config_create(rh_config** out);
RH_API void rh_config_destroy(rh_config* config);
/* Merges an INI-style file; later values win. */
RH_API rh_status rh_config_load_file(rh_config* config, const char* path);
/* Rejects unknown keys and unparsable values without modifying the config. */
RH_API rh_status rh_config_set(rh_config* config, const char* key, const char* value);
/* 1 when the key was set explicitly (file or rh_config_set), else 0. */
RH_API int rh_config_is_set(const rh_config* config, const char* key);
/* Effective settings as "key = value" lines. */
RH_API rh_status rh_config_render(const rh_config* config, rh_text** out);
RH_API rh_status rh_config_hash(const rh_config* config, rh_text** out);

/* ---------------------------------------------------------------------- */
/* Pipeline phases. Artefacts live under the config's "out" directory.    */
/* ---------------------------------------------------------------------- */

RH_API rh_status rh_prepare(const rh_config* config);
RH_API rh_status rh_extract(const rh_config* config);
RH_API rh_status rh_baseline(const rh_config* config, double* global_only, double* full);
/* region_maps (optional) receives one rendered map per variant run. */
RH_API rh_status rh_search(const rh_config* config, rh_text** region_maps);
RH_API rh_status rh_evaluate(const rh_config* config);
/* report_json (optional) receives the report written to report.json. */
RH_API rh_status rh_report(const rh_config* config, rh_text** report_json);
RH_API rh_status rh_run_pipeline(const rh_config* config, rh_text** report_json);

/* ---------------------------------------------------------------------- */
/* Utilities                                                              */
/* ---------------------------------------------------------------------- */

typedef struct rh_hs_params {
  int hms;
  double hmcr;
  double par;
  double bw;
  int ni;
  uint64_t seed;
} rh_hs_params;

/* Writes PGM glyphs plus manifest.csv into dir. */
RH_API rh_status rh_synth_write(int classes, int per_class, double noise, uint64_t seed, const char* dir);

/* Continuous harmony search on the sphere function over [lo, hi]^dimension.
 * csv_path may be NULL. monotone receives 1 when the best-so-far trajectory
 * never increased. */
RH_API rh_status rh_bench_sphere(int dimension, double lo, double hi, const rh_hs_params* params,
                                 const char* csv_path, double* best_value, int* monotone);

RH_API rh_status rh_region_map(const int* indices, size_t count, rh_text** out);
RH_API rh_status rh_strip_timing(const char* json, rh_text** out);

/* ---------------------------------------------------------------------- */
/* Images, partitioning and features                                      */
/* ---------------------------------------------------------------------- */

typedef struct rh_image rh_image;

/* PGM (P2/P5) or PNG, loaded as gray. */
RH_API rh_status rh_image_load(const char* path, rh_image** out);
RH_API rh_status rh_image_from_gray(const uint8_t* pixels, int height, int width, rh_image** out);
RH_API void rh_image_destroy(rh_image* image);
RH_API rh_status rh_image_size(const rh_image* image, int* height, int* width);
/* Otsu binarization in place. uniform (optional) is set to 1 for single-level input. */
RH_API rh_status rh_image_binarize(rh_image* image, int* uniform);
/* Crop + rescale a binarized image in place. */
RH_API rh_status rh_image_normalize(rh_image* image, int height, int width);
/* Copies height*width values: {0,1} once binarized, gray levels before. */
RH_API rh_status rh_image_pixels(const rh_image* image, uint8_t* out, size_t capacity);
/* 21 regions x (top, left, bottom, right) of the centroid quad-tree. */
RH_API rh_status rh_image_regions(const rh_image* image, int* out, size_t capacity);
/* Feature vector for the selected level-2 regions; written receives
 * 20 + 4 * count. Pass out == NULL to query the length. */
RH_API rh_status rh_image_features(const rh_image* image, const int* selected, size_t count, double* out,
                                   size_t capacity, size_t* written);

#ifdef __cplusplus
}
#endif

#endif /* REGIONHARVEST_H */

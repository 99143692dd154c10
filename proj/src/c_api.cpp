#include "regionharvest/regionharvest.h"

#include <cstring>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "regionharvest/dataset.hpp"
#include "regionharvest/error.hpp"
#include "regionharvest/experiment.hpp"
#include "regionharvest/features.hpp"
#include "regionharvest/partition.hpp"

struct rh_text {
  std::string value;
};

struct rh_config {
  rh::ConfigMap values;
};

struct rh_image {
  rh::GrayImage gray;
  std::optional<rh::BinaryImage> binary;
};

namespace {

thread_local std::string last_error;

rh_status to_status(rh::ErrorCode code) {
  switch (code) {
    case rh::ErrorCode::InvalidArgument: return RH_ERR_INVALID_ARGUMENT;
    case rh::ErrorCode::Io: return RH_ERR_IO;
    case rh::ErrorCode::MissingFile: return RH_ERR_MISSING_FILE;
    case rh::ErrorCode::UnreadableImage: return RH_ERR_UNREADABLE_IMAGE;
    case rh::ErrorCode::EmptyManifest: return RH_ERR_EMPTY_MANIFEST;
    case rh::ErrorCode::MalformedManifest: return RH_ERR_MALFORMED_MANIFEST;
    case rh::ErrorCode::Precondition: return RH_ERR_PRECONDITION;
    case rh::ErrorCode::PhaseOrder: return RH_ERR_PHASE_ORDER;
    case rh::ErrorCode::Internal: return RH_ERR_INTERNAL;
  }
  return RH_ERR_INTERNAL;
}

template <typename F>
rh_status guarded(F&& body) {
  try {
    body();
    return RH_OK;
  } catch (const rh::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RH_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RH_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return RH_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) rh::fail(rh::ErrorCode::InvalidArgument, what);
}

void emit(rh_text** out, std::string value) {
  if (out) *out = new rh_text{std::move(value)};
}

rh::ExperimentConfig resolve(const rh_config* config) {
  require(config != nullptr, "config is null");
  return rh::ExperimentConfig::from_map(config->values);
}

const rh::BinaryImage& binary_of(const rh_image* image) {
  require(image != nullptr, "image is null");
  if (!image->binary) rh::fail(rh::ErrorCode::Precondition, "image must be binarized first");
  return *image->binary;
}

}  // namespace

extern "C" {

const char* rh_version(void) { return "0.1.0"; }

const char* rh_status_name(rh_status status) {
  switch (status) {
    case RH_OK: return "ok";
    case RH_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RH_ERR_IO: return "i/o error";
    case RH_ERR_MISSING_FILE: return "missing file";
    case RH_ERR_UNREADABLE_IMAGE: return "unreadable image";
    case RH_ERR_EMPTY_MANIFEST: return "empty manifest";
    case RH_ERR_MALFORMED_MANIFEST: return "malformed input";
    case RH_ERR_PRECONDITION: return "precondition failed";
    case RH_ERR_PHASE_ORDER: return "phase prerequisite missing";
    case RH_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rh_last_error(void) { return last_error.c_str(); }

const char* rh_text_data(const rh_text* text) { return text ? text->value.c_str() : ""; }
size_t rh_text_size(const rh_text* text) { return text ? text->value.size() : 0; }
void rh_text_destroy(rh_text* text) { delete text; }

rh_status rh_config_create(rh_config** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new rh_config{};
  });
}

void rh_config_destroy(rh_config* config) { delete config; }

rh_status rh_config_load_file(rh_config* config, const char* path) {
  return guarded([&] {
    require(config && path, "null argument");
    rh::ConfigMap merged = config->values;
    for (auto& [k, v] : rh::load_config_file(path)) merged[k] = v;
    rh::ExperimentConfig::from_map(merged);
    config->values = std::move(merged);
  });
}

rh_status rh_config_set(rh_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config && key && value, "null argument");
    rh::ConfigMap merged = config->values;
    merged[key] = value;
    rh::ExperimentConfig::from_map(merged);
    config->values = std::move(merged);
  });
}

int rh_config_is_set(const rh_config* config, const char* key) {
  return config && key && config->values.count(key) ? 1 : 0;
}

rh_status rh_config_render(const rh_config* config, rh_text** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    const auto c = resolve(config);
    std::string text;
    for (const auto& [k, v] : c.to_map()) text += k + " = " + v + "\n";
    text += "out = " + c.out_dir.string() + "\n";
    emit(out, std::move(text));
  });
}

rh_status rh_config_hash(const rh_config* config, rh_text** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    emit(out, rh::config_hash(resolve(config)));
  });
}

rh_status rh_prepare(const rh_config* config) { return guarded([&] { rh::run_prepare(resolve(config)); }); }

rh_status rh_extract(const rh_config* config) { return guarded([&] { rh::run_extract(resolve(config)); }); }

rh_status rh_baseline(const rh_config* config, double* global_only, double* full) {
  return guarded([&] {
    const auto b = rh::run_baseline(resolve(config));
    if (global_only) *global_only = b.global_only_validation;
    if (full) *full = b.full_validation;
  });
}

rh_status rh_search(const rh_config* config, rh_text** region_maps) {
  return guarded([&] {
    std::string maps;
    for (const auto& r : rh::run_search(resolve(config))) {
      char line[96];
      std::snprintf(line, sizeof line, "%s: best=%s fitness=%.6f\n", rh::to_string(r.variant).c_str(),
                    r.best_subset.to_string().c_str(), r.best_fitness);
      maps += line + rh::render_region_map(r.best_subset);
    }
    emit(region_maps, std::move(maps));
  });
}

rh_status rh_evaluate(const rh_config* config) { return guarded([&] { rh::run_evaluate(resolve(config)); }); }

rh_status rh_report(const rh_config* config, rh_text** report_json) {
  return guarded([&] { emit(report_json, rh::report_to_json(rh::run_report(resolve(config)))); });
}

rh_status rh_run_pipeline(const rh_config* config, rh_text** report_json) {
  return guarded([&] { emit(report_json, rh::report_to_json(rh::run_pipeline(resolve(config)))); });
}

rh_status rh_synth_write(int classes, int per_class, double noise, uint64_t seed, const char* dir) {
  return guarded([&] {
    require(dir != nullptr, "dir is null");
    rh::write_synthetic_corpus(dir, rh::generate_synthetic(classes, per_class, noise, seed));
  });
}

rh_status rh_bench_sphere(int dimension, double lo, double hi, const rh_hs_params* params, const char* csv_path,
                          double* best_value, int* monotone) {
  return guarded([&] {
    require(params != nullptr, "params is null");
    const rh::HSParams p{params->hms, params->hmcr, params->par, params->bw, params->ni, params->seed};
    const auto result = rh::bench_sphere(dimension, lo, hi, p, csv_path ? csv_path : "");
    if (best_value) *best_value = result.best.fitness;
    if (monotone) {
      *monotone = 1;
      for (std::size_t i = 1; i < result.trajectory.size(); ++i)
        if (result.trajectory[i] > result.trajectory[i - 1]) *monotone = 0;
    }
  });
}

rh_status rh_region_map(const int* indices, size_t count, rh_text** out) {
  return guarded([&] {
    require(out != nullptr && (indices != nullptr || count == 0), "null argument");
    const auto subset = rh::RegionSubset::from_indices(std::span<const int>(indices, count));
    emit(out, rh::render_region_map(subset));
  });
}

rh_status rh_strip_timing(const char* json, rh_text** out) {
  return guarded([&] {
    require(json && out, "null argument");
    emit(out, rh::strip_timing(json));
  });
}

rh_status rh_image_load(const char* path, rh_image** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new rh_image{rh::read_image(path), std::nullopt};
  });
}

rh_status rh_image_from_gray(const uint8_t* pixels, int height, int width, rh_image** out) {
  return guarded([&] {
    require(pixels && out, "null argument");
    rh::GrayImage gray(height, width);
    std::memcpy(gray.pixels.data(), pixels, gray.pixels.size());
    *out = new rh_image{std::move(gray), std::nullopt};
  });
}

void rh_image_destroy(rh_image* image) { delete image; }

rh_status rh_image_size(const rh_image* image, int* height, int* width) {
  return guarded([&] {
    require(image && height && width, "null argument");
    *height = image->binary ? image->binary->height() : image->gray.height;
    *width = image->binary ? image->binary->width() : image->gray.width;
  });
}

rh_status rh_image_binarize(rh_image* image, int* uniform) {
  return guarded([&] {
    require(image != nullptr, "image is null");
    auto result = rh::binarize(image->gray);
    if (uniform) *uniform = result.uniform ? 1 : 0;
    image->binary = std::move(result.image);
  });
}

rh_status rh_image_normalize(rh_image* image, int height, int width) {
  return guarded([&] {
    auto scaled = rh::normalize(binary_of(image), height, width);
    image->gray = rh::to_gray(scaled);
    image->binary = std::move(scaled);
  });
}

rh_status rh_image_pixels(const rh_image* image, uint8_t* out, size_t capacity) {
  return guarded([&] {
    require(image && out, "null argument");
    if (image->binary) {
      const auto px = image->binary->pixels();
      require(capacity >= px.size(), "buffer too small");
      std::memcpy(out, px.data(), px.size());
    } else {
      require(capacity >= image->gray.pixels.size(), "buffer too small");
      std::memcpy(out, image->gray.pixels.data(), image->gray.pixels.size());
    }
  });
}

rh_status rh_image_regions(const rh_image* image, int* out, size_t capacity) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(capacity >= 4 * rh::kTreeRegionCount, "buffer too small");
    const auto regions = rh::build_tree(binary_of(image)).all();
    for (std::size_t i = 0; i < regions.size(); ++i) {
      out[4 * i] = regions[i].top;
      out[4 * i + 1] = regions[i].left;
      out[4 * i + 2] = regions[i].bottom;
      out[4 * i + 3] = regions[i].right;
    }
  });
}

rh_status rh_image_features(const rh_image* image, const int* selected, size_t count, double* out, size_t capacity,
                            size_t* written) {
  return guarded([&] {
    require(selected != nullptr || count == 0, "selected is null");
    const auto subset = rh::RegionSubset::from_indices(std::span<const int>(selected, count));
    const auto& bin = binary_of(image);
    const std::size_t n = rh::feature_length(subset);
    if (written) *written = n;
    if (!out) return;
    require(capacity >= n, "buffer too small");
    const auto v = rh::assemble(rh::extract_features(bin), subset);
    std::copy(v.begin(), v.end(), out);
  });
}

}  // extern "C"

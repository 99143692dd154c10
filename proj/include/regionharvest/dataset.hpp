#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "regionharvest/image.hpp"

namespace rh {

// ---------------------------------------------------------------------------
// Image files
// ---------------------------------------------------------------------------

// Reads P2 or P5 PGM; values are rescaled to 0..255 when maxval != 255.
GrayImage read_pgm(const std::filesystem::path& path);
// Reads any PNG and converts it to 8-bit gray.
GrayImage read_png(const std::filesystem::path& path);
// Dispatches on the file signature (P2/P5 or PNG magic).
GrayImage read_image(const std::filesystem::path& path);

// Writes binary P5. Each entry of `comments` becomes a "# ..." line.
void write_pgm(const std::filesystem::path& path, const GrayImage& image,
               const std::vector<std::string>& comments = {});

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

struct RawSample {
  GrayImage image;
  int label = 0;
  std::string source_id;
};

struct Sample {
  BinaryImage image;
  int label = 0;
  std::string source_id;
};

struct Manifest {
  std::vector<RawSample> samples;
  // label_names[k] is the manifest label densified to k.
  std::vector<std::string> label_names;
};

// CSV rows of `image_path,label` (an `image_path,label` header row is
// optional). Relative image paths resolve against the manifest directory.
// Labels are densified to 0..K-1 in order of first appearance.
Manifest load_manifest(const std::filesystem::path& manifest_path);

struct BinarizeResult {
  BinaryImage image;
  // Pixels with gray value <= threshold are foreground.
  int threshold = 0;
  // Set when the input has a single gray level and no threshold exists.
  bool uniform = false;
};

// Otsu thresholding; the darker class becomes foreground. A two-level 0/255
// input maps 0 -> 1 and 255 -> 0. A single-level input maps to all
// foreground when the level is below 128 and to all background otherwise,
// with `uniform` set.
BinarizeResult binarize(const GrayImage& gray);

inline constexpr int kDefaultNormalizedSize = 32;

// Crops to the foreground bounding box and rescales to target_h x target_w.
// Along an axis that grows, each output index takes its nearest-neighbour
// source index floor(i * src / dst). Along an axis that shrinks, each output
// index ORs the source cell [floor(i*src/dst), floor((i+1)*src/dst)) so that
// no foreground line is dropped.
BinaryImage normalize(const BinaryImage& image, int target_h = kDefaultNormalizedSize,
                      int target_w = kDefaultNormalizedSize);

// Binarize + normalize; samples with empty foreground are dropped and counted.
struct PreparedSamples {
  std::vector<Sample> samples;
  std::size_t rejected_empty = 0;
  std::size_t uniform_warnings = 0;
};
PreparedSamples prepare_samples(const std::vector<RawSample>& raw, int target_h, int target_w);

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

struct DatasetSplit {
  std::vector<Sample> train;
  std::vector<Sample> validation;
  std::vector<Sample> test;
  int class_count = 0;
};

// Stratified per-class shuffle. Per class of n samples the validation and
// test counts are round(n * ratio), the remainder goes to train, and train
// always keeps at least one sample.
DatasetSplit split(const std::vector<Sample>& samples, const SplitRatios& ratios, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic glyph corpus
// ---------------------------------------------------------------------------

inline constexpr int kMaxSyntheticClasses = 26;
inline constexpr int kSyntheticSize = 32;

// Noise-free 32x32 stroke template for class `label` in [0, 26).
BinaryImage synthetic_template(int label);

// `per_class` samples for each of `class_count` templates, each pixel flipped
// independently with probability `noise`. Samples are ordered class-major.
std::vector<Sample> generate_synthetic(int class_count, int per_class, double noise, std::uint64_t seed);

// Writes each sample as PGM under `dir` together with `manifest.csv`.
void write_synthetic_corpus(const std::filesystem::path& dir, const std::vector<Sample>& samples);

}  // namespace rh

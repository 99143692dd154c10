#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "regionharvest/image.hpp"
#include "regionharvest/partition.hpp"
#include "regionharvest/region_subset.hpp"

namespace rh {

enum class Direction { Row, Col, Diag1, Diag2 };

inline constexpr std::array<Direction, 4> kDirections = {Direction::Row, Direction::Col, Direction::Diag1,
                                                         Direction::Diag2};

inline constexpr int kFeaturesPerRegion = 4;
inline constexpr int kGlobalFeatureCount = (1 + kLevel1Count) * kFeaturesPerRegion;        // 20
inline constexpr int kFullFeatureCount = kTreeRegionCount * kFeaturesPerRegion;            // 84

// Longest-run features of one region, each in [0, 1].
// diag1 walks (+1,+1); diag2 walks (+1,-1).
struct RegionFeatures {
  double row = 0.0;
  double col = 0.0;
  double diag1 = 0.0;
  double diag2 = 0.0;

  bool operator==(const RegionFeatures&) const = default;
};

// The 21 region feature blocks of one sample, in RegionTree::all() order.
using SampleFeatures = std::array<RegionFeatures, kTreeRegionCount>;

using FeatureVector = std::vector<double>;

// Length of the longest run of 1s.
int longest_run(std::span<const std::uint8_t> line);

// Sum over all lines of `region` in `direction` of their longest run,
// divided by the region area. 0 for an EMPTY region. A h x w region has h
// row lines, w column lines and h+w-1 lines per diagonal direction.
double directional_feature(const BinaryImage& image, const Region& region, Direction direction);

RegionFeatures region_features(const BinaryImage& image, const Region& region);

SampleFeatures extract_features(const BinaryImage& image, const RegionTree& tree);
SampleFeatures extract_features(const BinaryImage& image);

// 20 global values (level 0, then level 1 region-major) followed by 4 values
// per selected level-2 region in ascending index. Within a region the order
// is row, col, diag1, diag2.
FeatureVector assemble(const SampleFeatures& features, const RegionSubset& selected);
FeatureVector assemble(const BinaryImage& image, const RegionTree& tree, const RegionSubset& selected);

inline std::size_t feature_length(const RegionSubset& selected) {
  return static_cast<std::size_t>(kGlobalFeatureCount + kFeaturesPerRegion * selected.size());
}

// ---------------------------------------------------------------------------
// Feature store: CSV with header `sample_id,label,f0,...,f83`.
// ---------------------------------------------------------------------------

struct FeatureRecord {
  std::string sample_id;
  int label = 0;
  SampleFeatures features{};
};

// `preamble` lines are written first as "# ..." comments.
void write_feature_store(std::ostream& out, const std::vector<FeatureRecord>& records,
                         const std::vector<std::string>& preamble = {});
std::vector<FeatureRecord> read_feature_store(std::istream& in);

}  // namespace rh

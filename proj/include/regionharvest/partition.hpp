#pragma once

#include <array>
#include <iosfwd>
#include <utility>

#include "regionharvest/image.hpp"

namespace rh {

// Inclusive bounding rectangle in image coordinates. A region whose
// top > bottom or left > right is EMPTY.
struct Region {
  int top = 0;
  int left = 0;
  int bottom = -1;
  int right = -1;

  static constexpr Region make_empty() { return {0, 0, -1, -1}; }

  bool empty() const noexcept { return top > bottom || left > right; }
  int height() const noexcept { return empty() ? 0 : bottom - top + 1; }
  int width() const noexcept { return empty() ? 0 : right - left + 1; }
  long area() const noexcept { return static_cast<long>(height()) * width(); }
  bool contains(int r, int c) const noexcept { return !empty() && r >= top && r <= bottom && c >= left && c <= right; }

  bool operator==(const Region&) const = default;
};

inline constexpr int kLevel1Count = 4;
inline constexpr int kLocalRegionCount = 16;
inline constexpr int kTreeRegionCount = 1 + kLevel1Count + kLocalRegionCount;

// Quadrant order everywhere: top-left, top-right, bottom-left, bottom-right.
using Quadrants = std::array<Region, 4>;

struct RegionTree {
  Region level0;
  std::array<Region, kLevel1Count> level1;
  // Index = 4 * parent quadrant + child quadrant.
  std::array<Region, kLocalRegionCount> level2;

  // level0, level1[0..3], level2[0..15].
  std::array<Region, kTreeRegionCount> all() const;
};

struct Point {
  double row = 0.0;
  double col = 0.0;
};

// Foreground centre of gravity inside `region`; the geometric centre when
// the region holds no foreground. Throws on an EMPTY region.
Point centroid(const BinaryImage& image, const Region& region);

// Splits at the rounded centroid. The split row is the first row of the
// bottom half and is clamped to [top+1, bottom]; a single-row region gets an
// EMPTY bottom pair (columns likewise).
Quadrants split4(const BinaryImage& image, const Region& region);

// Three-level centroid quad-tree. Throws when the image has no foreground.
RegionTree build_tree(const BinaryImage& image);

// CSV rows `level,index,top,left,bottom,right` with a header.
void write_region_table(std::ostream& out, const RegionTree& tree);

}  // namespace rh

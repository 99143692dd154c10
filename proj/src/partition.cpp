#include "regionharvest/partition.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "regionharvest/error.hpp"

namespace rh {

std::array<Region, kTreeRegionCount> RegionTree::all() const {
  std::array<Region, kTreeRegionCount> out;
  out[0] = level0;
  std::copy(level1.begin(), level1.end(), out.begin() + 1);
  std::copy(level2.begin(), level2.end(), out.begin() + 1 + kLevel1Count);
  return out;
}

Point centroid(const BinaryImage& image, const Region& region) {
  if (region.empty()) fail(ErrorCode::InvalidArgument, "centroid of an empty region");
  long mass = 0, row_sum = 0, col_sum = 0;
  for (int r = region.top; r <= region.bottom; ++r) {
    const auto line = image.row(r);
    for (int c = region.left; c <= region.right; ++c)
      if (line[static_cast<std::size_t>(c)]) {
        ++mass;
        row_sum += r;
        col_sum += c;
      }
  }
  if (mass == 0) return {(region.top + region.bottom) / 2.0, (region.left + region.right) / 2.0};
  return {static_cast<double>(row_sum) / static_cast<double>(mass),
          static_cast<double>(col_sum) / static_cast<double>(mass)};
}

namespace {

// Round half up, then clamp to [lo + 1, hi]. For lo == hi this yields hi + 1,
// i.e. the second half is empty.
int split_index(double centre, int lo, int hi) {
  const int s = static_cast<int>(std::floor(centre + 0.5));
  if (lo == hi) return hi + 1;
  return std::clamp(s, lo + 1, hi);
}

Region make_region(int top, int left, int bottom, int right) {
  Region r{top, left, bottom, right};
  return r.empty() ? Region::make_empty() : r;
}

}  // namespace

Quadrants split4(const BinaryImage& image, const Region& region) {
  if (region.empty()) fail(ErrorCode::InvalidArgument, "split4 of an empty region");
  const Point cg = centroid(image, region);
  const int sr = split_index(cg.row, region.top, region.bottom);
  const int sc = split_index(cg.col, region.left, region.right);
  return {
      make_region(region.top, region.left, sr - 1, sc - 1),
      make_region(region.top, sc, sr - 1, region.right),
      make_region(sr, region.left, region.bottom, sc - 1),
      make_region(sr, sc, region.bottom, region.right),
  };
}

RegionTree build_tree(const BinaryImage& image) {
  if (image.foreground_count() == 0) fail(ErrorCode::Precondition, "cannot partition an image with no foreground");
  RegionTree tree;
  tree.level0 = {0, 0, image.height() - 1, image.width() - 1};
  tree.level1 = split4(image, tree.level0);
  for (int q = 0; q < kLevel1Count; ++q) {
    const Region& parent = tree.level1[static_cast<std::size_t>(q)];
    Quadrants children;
    children.fill(Region::make_empty());
    if (!parent.empty()) children = split4(image, parent);
    std::copy(children.begin(), children.end(), tree.level2.begin() + 4 * q);
  }
  return tree;
}

void write_region_table(std::ostream& out, const RegionTree& tree) {
  out << "level,index,top,left,bottom,right\n";
  const auto row = [&](int level, int index, const Region& r) {
    out << level << ',' << index << ',' << r.top << ',' << r.left << ',' << r.bottom << ',' << r.right << '\n';
  };
  row(0, 0, tree.level0);
  for (int i = 0; i < kLevel1Count; ++i) row(1, i, tree.level1[static_cast<std::size_t>(i)]);
  for (int i = 0; i < kLocalRegionCount; ++i) row(2, i, tree.level2[static_cast<std::size_t>(i)]);
}

}  // namespace rh

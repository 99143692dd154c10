#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They favour obviousness over speed.

#include <algorithm>
#include <map>
#include <vector>

#include "regionharvest/features.hpp"
#include "regionharvest/image.hpp"
#include "regionharvest/partition.hpp"

namespace rh::test {

// Materializes every line of `region` in `direction` and counts its longest
// run; returns the run sum over the region area.
inline double naive_feature(const BinaryImage& img, const Region& region, Direction direction) {
  if (region.empty()) return 0.0;
  const auto run = [](const std::vector<int>& line) {
    int best = 0, cur = 0;
    for (int v : line) {
      cur = v ? cur + 1 : 0;
      best = std::max(best, cur);
    }
    return best;
  };
  std::vector<std::vector<int>> lines;
  const int t = region.top, l = region.left, b = region.bottom, rt = region.right;
  switch (direction) {
    case Direction::Row:
      for (int r = t; r <= b; ++r) {
        std::vector<int> line;
        for (int c = l; c <= rt; ++c) line.push_back(img.at(r, c));
        lines.push_back(line);
      }
      break;
    case Direction::Col:
      for (int c = l; c <= rt; ++c) {
        std::vector<int> line;
        for (int r = t; r <= b; ++r) line.push_back(img.at(r, c));
        lines.push_back(line);
      }
      break;
    case Direction::Diag1:
    case Direction::Diag2: {
      // Group pixels by diagonal key, visiting rows top to bottom.
      const bool anti = direction == Direction::Diag2;
      std::map<int, std::vector<int>> by_key;
      for (int r = t; r <= b; ++r)
        for (int c = l; c <= rt; ++c) by_key[anti ? r + c : r - c].push_back(img.at(r, c));
      for (auto& [k, line] : by_key) lines.push_back(line);
      break;
    }
  }
  double sum = 0;
  for (const auto& line : lines) sum += run(line);
  return sum / static_cast<double>(region.area());
}

// Number of lines the naive scanner sees; h + w - 1 for the diagonals.
inline std::size_t naive_line_count(const Region& region, Direction direction) {
  if (region.empty()) return 0;
  switch (direction) {
    case Direction::Row: return static_cast<std::size_t>(region.height());
    case Direction::Col: return static_cast<std::size_t>(region.width());
    default: break;
  }
  std::map<int, int> keys;
  for (int r = region.top; r <= region.bottom; ++r)
    for (int c = region.left; c <= region.right; ++c) ++keys[direction == Direction::Diag2 ? r + c : r - c];
  return keys.size();
}

// Every pixel of `parent` lies in exactly one of `parts` and no pixel
// outside `parent` is covered.
template <typename Parts>
bool exact_cover(const Region& parent, const Parts& parts, int h, int w) {
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      int count = 0;
      for (const auto& p : parts) count += p.contains(r, c) ? 1 : 0;
      if (count != (parent.contains(r, c) ? 1 : 0)) return false;
    }
  return true;
}

}  // namespace rh::test

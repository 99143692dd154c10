#include "regionharvest/region_subset.hpp"

#include <algorithm>

#include "regionharvest/error.hpp"

namespace rh {

RegionSubset RegionSubset::from_indices(std::span<const int> indices) {
  RegionSubset s;
  for (const int i : indices) {
    if (i < 0 || i >= kLocalRegionCount)
      fail(ErrorCode::InvalidArgument, "region index " + std::to_string(i) + " outside 0..15");
    if (s.contains(i)) fail(ErrorCode::InvalidArgument, "duplicate region index " + std::to_string(i));
    s.insert(i);
  }
  return s;
}

std::vector<int> RegionSubset::indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int i = 0; i < kLocalRegionCount; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

std::string RegionSubset::to_string() const {
  std::string s = "{";
  bool first = true;
  for (const int i : indices()) {
    if (!first) s += ',';
    s += std::to_string(i);
    first = false;
  }
  return s + "}";
}

bool canonical_less(const RegionSubset& a, const RegionSubset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  const auto ia = a.indices();
  const auto ib = b.indices();
  return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end());
}

}  // namespace rh

#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "regionharvest/partition.hpp"

namespace rh {

// Set of level-2 region indices in [0, 16), stored as a bitmask.
class RegionSubset {
 public:
  constexpr RegionSubset() = default;
  explicit constexpr RegionSubset(std::uint16_t mask) : mask_(mask) {}

  // Throws on an index outside [0, 16) or a repeated index.
  static RegionSubset from_indices(std::span<const int> indices);
  static RegionSubset from_indices(std::initializer_list<int> indices) {
    return from_indices(std::span<const int>(indices.begin(), indices.size()));
  }
  static constexpr RegionSubset all() { return RegionSubset(0xFFFF); }
  static constexpr RegionSubset single(int index) { return RegionSubset(static_cast<std::uint16_t>(1u << index)); }

  constexpr std::uint16_t mask() const noexcept { return mask_; }
  constexpr int size() const noexcept { return std::popcount(mask_); }
  constexpr bool empty() const noexcept { return mask_ == 0; }
  constexpr bool contains(int index) const noexcept { return (mask_ >> index) & 1u; }
  constexpr void insert(int index) noexcept { mask_ = static_cast<std::uint16_t>(mask_ | (1u << index)); }
  constexpr void erase(int index) noexcept { mask_ = static_cast<std::uint16_t>(mask_ & ~(1u << index)); }

  // Ascending.
  std::vector<int> indices() const;
  // e.g. "{0,3,7}"
  std::string to_string() const;

  constexpr bool operator==(const RegionSubset&) const = default;

 private:
  std::uint16_t mask_ = 0;
};

// Canonical preference order among subsets of equal fitness: smaller
// cardinality first, then the lexicographically smaller ascending index list.
bool canonical_less(const RegionSubset& a, const RegionSubset& b);

}  // namespace rh

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "regionharvest/image.hpp"
#include "regionharvest/rng.hpp"

namespace rh::test {

inline BinaryImage random_bitmap(Rng& rng, int h, int w, double density = 0.5) {
  BinaryImage img(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) img.set(r, c, rng.bernoulli(density));
  return img;
}

// Rows given as strings of '0'/'1'.
inline BinaryImage bitmap(std::initializer_list<const char*> rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(std::string(*rows.begin()).size());
  BinaryImage img(h, w);
  int r = 0;
  for (const char* row : rows) {
    for (int c = 0; c < w; ++c) img.set(r, c, row[c] == '1');
    ++r;
  }
  return img;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("regionharvest-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace rh::test

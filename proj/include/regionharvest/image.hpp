#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rh {

// 8-bit grayscale raster, row-major. 0 = black.
struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int h, int w, std::uint8_t fill = 0);

  std::uint8_t at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * width + c]; }
  std::uint8_t& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * width + c]; }

  bool operator==(const GrayImage&) const = default;
};

// H x W grid of {0,1}; 1 = foreground (ink).
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int height, int width);
  // Throws if any value is not 0 or 1 or the dimensions are not positive.
  BinaryImage(int height, int width, std::vector<std::uint8_t> pixels);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  std::uint8_t at(int r, int c) const { return pixels_[index(r, c)]; }
  void set(int r, int c, bool on) { pixels_[index(r, c)] = on ? 1 : 0; }

  std::span<const std::uint8_t> row(int r) const {
    return {pixels_.data() + index(r, 0), static_cast<std::size_t>(width_)};
  }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

  std::size_t foreground_count() const noexcept;

  bool operator==(const BinaryImage&) const = default;

 private:
  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * width_ + c; }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// Foreground -> 0 (black), background -> 255.
GrayImage to_gray(const BinaryImage& image);

}  // namespace rh

#include "regionharvest/image.hpp"

#include <algorithm>
#include <numeric>

#include "regionharvest/error.hpp"

namespace rh {

GrayImage::GrayImage(int h, int w, std::uint8_t fill)
    : height(h), width(w), pixels(static_cast<std::size_t>(h) * w, fill) {
  if (h < 1 || w < 1) fail(ErrorCode::InvalidArgument, "image dimensions must be positive");
}

BinaryImage::BinaryImage(int height, int width)
    : height_(height), width_(width), pixels_(static_cast<std::size_t>(height) * width, 0) {
  if (height < 1 || width < 1) fail(ErrorCode::InvalidArgument, "image dimensions must be positive");
}

BinaryImage::BinaryImage(int height, int width, std::vector<std::uint8_t> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  if (height < 1 || width < 1) fail(ErrorCode::InvalidArgument, "image dimensions must be positive");
  if (pixels_.size() != static_cast<std::size_t>(height) * width)
    fail(ErrorCode::InvalidArgument, "pixel count does not match dimensions");
  if (std::any_of(pixels_.begin(), pixels_.end(), [](std::uint8_t v) { return v > 1; }))
    fail(ErrorCode::InvalidArgument, "binary image pixels must be 0 or 1");
}

std::size_t BinaryImage::foreground_count() const noexcept {
  return std::accumulate(pixels_.begin(), pixels_.end(), std::size_t{0});
}

GrayImage to_gray(const BinaryImage& image) {
  GrayImage out(image.height(), image.width(), 255);
  for (int r = 0; r < image.height(); ++r)
    for (int c = 0; c < image.width(); ++c)
      if (image.at(r, c)) out.at(r, c) = 0;
  return out;
}

}  // namespace rh

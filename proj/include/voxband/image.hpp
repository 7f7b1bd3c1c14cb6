#pragma once

#include <vector>

#include "voxband/geometry.hpp"

namespace voxband {

// Row-major interleaved image. Color images hold values in [0,1];
// depth and feature maps are unbounded.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> values;  // width*height*channels

  ImageBuffer() = default;
  ImageBuffer(int w, int h, int c, double fill = 0.0)
      : width(w), height(h), channels(c), values(size_t(w) * h * c, fill) {}

  double& at(int x, int y, int c) {
    return values[(size_t(y) * width + x) * channels + c];
  }
  double at(int x, int y, int c) const {
    return values[(size_t(y) * width + x) * channels + c];
  }

  bool in_bounds(const Vec2& pixel) const {
    return pixel.x() >= 0 && pixel.x() <= width - 1 &&
           pixel.y() >= 0 && pixel.y() <= height - 1;
  }

  // Bilinear blend of the four surrounding texels, per channel.
  // Throws on out-of-bounds pixels; callers pre-filter with Projection::valid.
  std::vector<double> bilinear(const Vec2& pixel) const;

  // Nearest-texel lookup, pixel clamped to bounds.
  std::vector<double> nearest(const Vec2& pixel) const;
};

}  // namespace voxband

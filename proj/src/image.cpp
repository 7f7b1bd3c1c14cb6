#include "voxband/image.hpp"

#include <algorithm>
#include <cmath>

#include "voxband/errors.hpp"

namespace voxband {

std::vector<double> ImageBuffer::bilinear(const Vec2& pixel) const {
  if (!in_bounds(pixel))
    throw NumericError("bilinear sample outside image bounds");
  const int x0 = std::min(int(std::floor(pixel.x())), width - 2 >= 0 ? width - 2 : 0);
  const int y0 = std::min(int(std::floor(pixel.y())), height - 2 >= 0 ? height - 2 : 0);
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double fx = pixel.x() - x0;
  const double fy = pixel.y() - y0;
  std::vector<double> out(channels);
  for (int c = 0; c < channels; ++c) {
    const double top = (1 - fx) * at(x0, y0, c) + fx * at(x1, y0, c);
    const double bot = (1 - fx) * at(x0, y1, c) + fx * at(x1, y1, c);
    out[c] = (1 - fy) * top + fy * bot;
  }
  return out;
}

std::vector<double> ImageBuffer::nearest(const Vec2& pixel) const {
  const int x = std::clamp(int(std::lround(pixel.x())), 0, width - 1);
  const int y = std::clamp(int(std::lround(pixel.y())), 0, height - 1);
  std::vector<double> out(channels);
  for (int c = 0; c < channels; ++c) out[c] = at(x, y, c);
  return out;
}

}  // namespace voxband

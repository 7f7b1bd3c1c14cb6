#pragma once

#include <string>

#include "voxband/image.hpp"

namespace voxband {

// 8-bit PNG, values scaled to [0,1]. Gray and RGB(A) inputs supported;
// alpha is dropped on load.
ImageBuffer load_png(const std::string& path);
void save_png(const std::string& path, const ImageBuffer& image);

// 32-bit float little-endian PFM, 1 or 3 channels (scale -1.0).
ImageBuffer load_pfm(const std::string& path);
void save_pfm(const std::string& path, const ImageBuffer& image);

ImageBuffer load_image(const std::string& path);  // dispatches on extension

}  // namespace voxband

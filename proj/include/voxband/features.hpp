#pragma once

#include <string>
#include <vector>

#include "voxband/camera.hpp"
#include "voxband/image.hpp"
#include "voxband/sparse_field.hpp"

namespace voxband {

// Per-view 2D feature map, nominally 256x256 regardless of the input image size.
struct FeatureMap {
  int view = 0;
  ImageBuffer map;
};

// Deterministic hand-built features: 3 RGB channels, 6 Sobel gradient channels
// (per color, x then y), then Gaussian-blurred luminance at dyadic scales
// cycled until `channels` is reached. Input is resampled to `size` first.
FeatureMap handcrafted_features(const ImageBuffer& image, int channels, int size = 256);

// Replayable 2D conv stack for externally trained extractors.
// Layers: conv3x3 (+optional ReLU), avgpool2, upsample2 (nearest).
struct Conv2dLayer {
  enum class Kind { Conv3x3, Downsample, Upsample };
  Kind kind = Kind::Conv3x3;
  int in_channels = 0, out_channels = 0;  // conv only
  bool relu = false;
  std::vector<double> weights;  // 9 * in * out, row-major (ky, kx, in, out)
  std::vector<double> bias;     // out
};

struct FeatureExtractor {
  std::vector<Conv2dLayer> layers;
  ImageBuffer apply(const ImageBuffer& image) const;
};

// "VBX1" little-endian float32 weight blob.
FeatureExtractor load_extractor(const std::string& path);
void save_extractor(const std::string& path, const FeatureExtractor& ex);

// Mean back-projection: per site, average the bilinear feature map
// samples over views with a valid projection. Pixels are rescaled from image
// to feature-map resolution. Sites visible in no view get zeros.
struct FeatureVolumeResult {
  SparseField field;
  std::int64_t sites_without_view = 0;
};
FeatureVolumeResult build_feature_volume(ActiveSetPtr active,
                                         const std::vector<CameraView>& cameras,
                                         const std::vector<FeatureMap>& maps);

ImageBuffer resample_image(const ImageBuffer& image, int width, int height);

}  // namespace voxband

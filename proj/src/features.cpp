#include "voxband/features.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "voxband/errors.hpp"
#include "voxband/parallel.hpp"

namespace voxband {

ImageBuffer resample_image(const ImageBuffer& image, int width, int height) {
  if (image.width == width && image.height == height) return image;
  ImageBuffer out(width, height, image.channels);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const Vec2 src(double(x) * (image.width - 1) / std::max(1, width - 1),
                     double(y) * (image.height - 1) / std::max(1, height - 1));
      const auto v = image.bilinear(src);
      for (int c = 0; c < image.channels; ++c) out.at(x, y, c) = v[c];
    }
  return out;
}

namespace {

int reflect(int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); }

ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma) {
  const int radius = std::max(1, int(std::ceil(3 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (auto& k : kernel) k /= sum;
  ImageBuffer tmp(img.width, img.height, img.channels), out(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0;
        for (int i = -radius; i <= radius; ++i)
          acc += kernel[i + radius] * img.at(reflect(x + i, img.width), y, c);
        tmp.at(x, y, c) = acc;
      }
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0;
        for (int i = -radius; i <= radius; ++i)
          acc += kernel[i + radius] * tmp.at(x, reflect(y + i, img.height), c);
        out.at(x, y, c) = acc;
      }
  return out;
}

}  // namespace

FeatureMap handcrafted_features(const ImageBuffer& image, int channels, int size) {
  if (channels < 9) throw ConfigError("handcrafted features need at least 9 channels");
  ImageBuffer rgb = image;
  if (rgb.channels == 1) {
    rgb = ImageBuffer(image.width, image.height, 3);
    for (int y = 0; y < image.height; ++y)
      for (int x = 0; x < image.width; ++x)
        for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = image.at(x, y, 0);
  }
  rgb = resample_image(rgb, size, size);

  FeatureMap fm;
  fm.map = ImageBuffer(size, size, channels);
  // channels 0..2: RGB
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      for (int c = 0; c < 3; ++c) fm.map.at(x, y, c) = rgb.at(x, y, c);
  // channels 3..8: Sobel x/y per color
  static const int sx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const int sy[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      for (int c = 0; c < 3; ++c) {
        double gx = 0, gy = 0;
        for (int j = -1; j <= 1; ++j)
          for (int i = -1; i <= 1; ++i) {
            const double v = rgb.at(reflect(x + i, size), reflect(y + j, size), c);
            gx += sx[j + 1][i + 1] * v;
            gy += sy[j + 1][i + 1] * v;
          }
        fm.map.at(x, y, 3 + 2 * c) = gx;
        fm.map.at(x, y, 3 + 2 * c + 1) = gy;
      }
  // remaining: blurred luminance at dyadic scales, cycled
  if (channels > 9) {
    ImageBuffer lum(size, size, 1);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x)
        lum.at(x, y, 0) =
            0.299 * rgb.at(x, y, 0) + 0.587 * rgb.at(x, y, 1) + 0.114 * rgb.at(x, y, 2);
    const int n_scales = std::min(channels - 9, 6);
    std::vector<ImageBuffer> scales;
    for (int s = 0; s < n_scales; ++s) scales.push_back(gaussian_blur(lum, double(1 << s)));
    for (int c = 9; c < channels; ++c) {
      const ImageBuffer& b = scales[(c - 9) % n_scales];
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) fm.map.at(x, y, c) = b.at(x, y, 0);
    }
  }
  return fm;
}

ImageBuffer FeatureExtractor::apply(const ImageBuffer& image) const {
  ImageBuffer cur = image;
  for (const auto& layer : layers) {
    switch (layer.kind) {
      case Conv2dLayer::Kind::Conv3x3: {
        if (cur.channels != layer.in_channels)
          throw ConfigError("extractor layer channel mismatch");
        ImageBuffer next(cur.width, cur.height, layer.out_channels);
        for (int y = 0; y < cur.height; ++y)
          for (int x = 0; x < cur.width; ++x)
            for (int o = 0; o < layer.out_channels; ++o) {
              double acc = layer.bias[o];
              for (int j = -1; j <= 1; ++j)
                for (int i = -1; i <= 1; ++i)
                  for (int c = 0; c < layer.in_channels; ++c)
                    acc += layer.weights[(((j + 1) * 3 + (i + 1)) * layer.in_channels + c) *
                                             layer.out_channels +
                                         o] *
                           cur.at(reflect(x + i, cur.width), reflect(y + j, cur.height), c);
              next.at(x, y, o) = layer.relu ? std::max(0.0, acc) : acc;
            }
        cur = std::move(next);
        break;
      }
      case Conv2dLayer::Kind::Downsample: {
        ImageBuffer next(cur.width / 2, cur.height / 2, cur.channels);
        for (int y = 0; y < next.height; ++y)
          for (int x = 0; x < next.width; ++x)
            for (int c = 0; c < cur.channels; ++c)
              next.at(x, y, c) = (cur.at(2 * x, 2 * y, c) + cur.at(2 * x + 1, 2 * y, c) +
                                  cur.at(2 * x, 2 * y + 1, c) + cur.at(2 * x + 1, 2 * y + 1, c)) /
                                 4.0;
        cur = std::move(next);
        break;
      }
      case Conv2dLayer::Kind::Upsample: {
        ImageBuffer next(cur.width * 2, cur.height * 2, cur.channels);
        for (int y = 0; y < next.height; ++y)
          for (int x = 0; x < next.width; ++x)
            for (int c = 0; c < cur.channels; ++c) next.at(x, y, c) = cur.at(x / 2, y / 2, c);
        cur = std::move(next);
        break;
      }
    }
  }
  return cur;
}

namespace {

template <typename T>
void write_le(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void save_extractor(const std::string& path, const FeatureExtractor& ex) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write extractor: " + path);
  out.write("VBX1", 4);
  write_le<std::uint32_t>(out, std::uint32_t(ex.layers.size()));
  for (const auto& l : ex.layers) {
    write_le<std::uint8_t>(out, std::uint8_t(l.kind));
    write_le<std::uint8_t>(out, l.relu ? 1 : 0);
    write_le<std::uint32_t>(out, std::uint32_t(l.in_channels));
    write_le<std::uint32_t>(out, std::uint32_t(l.out_channels));
    for (double w : l.weights) write_le<float>(out, float(w));
    for (double b : l.bias) write_le<float>(out, float(b));
  }
}

FeatureExtractor load_extractor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open extractor: " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "VBX1", 4) != 0) throw IoError("not a VBX1 extractor blob: " + path);
  FeatureExtractor ex;
  const auto n = read_le<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n; ++i) {
    Conv2dLayer l;
    l.kind = Conv2dLayer::Kind(read_le<std::uint8_t>(in));
    l.relu = read_le<std::uint8_t>(in) != 0;
    l.in_channels = int(read_le<std::uint32_t>(in));
    l.out_channels = int(read_le<std::uint32_t>(in));
    if (l.kind == Conv2dLayer::Kind::Conv3x3) {
      l.weights.resize(size_t(9) * l.in_channels * l.out_channels);
      l.bias.resize(l.out_channels);
      for (auto& w : l.weights) w = read_le<float>(in);
      for (auto& b : l.bias) b = read_le<float>(in);
    }
    ex.layers.push_back(std::move(l));
  }
  if (!in) throw IoError("truncated extractor blob: " + path);
  return ex;
}

FeatureVolumeResult build_feature_volume(ActiveSetPtr active,
                                         const std::vector<CameraView>& cameras,
                                         const std::vector<FeatureMap>& maps) {
  if (cameras.empty()) throw ConfigError("feature volume needs at least one view");
  if (cameras.size() != maps.size())
    throw ConfigError("camera and feature map counts do not match");
  if (!active || active->empty()) throw ConfigError("feature volume needs a non-empty active set");
  const int C = maps[0].map.channels;
  for (const auto& m : maps)
    if (m.map.channels != C) throw ConfigError("feature maps disagree on channel count");

  FeatureVolumeResult res{SparseField(active, C, 0.0), 0};
  const VolumeSpec& spec = active->spec();
  std::vector<std::uint8_t> orphan(size_t(active->size()), 0);
  parallel_for(0, active->size(), [&](std::int64_t i) {
    const Vec3 p = spec.position(active->site(i));
    auto row = res.field.row(i);
    int n_valid = 0;
    for (size_t v = 0; v < cameras.size(); ++v) {
      const Projection pr = cameras[v].project(p);
      if (!pr.valid) continue;
      // image pixel -> feature map pixel: (u,v) * (map / image), clamped at the
      // half-texel overhang on the far edge
      const Vec2 fpix(
          std::clamp(pr.pixel.x() * maps[v].map.width / cameras[v].width, 0.0,
                     double(maps[v].map.width - 1)),
          std::clamp(pr.pixel.y() * maps[v].map.height / cameras[v].height, 0.0,
                     double(maps[v].map.height - 1)));
      const auto f = maps[v].map.bilinear(fpix);
      for (int c = 0; c < C; ++c) row[c] += f[c];
      ++n_valid;
    }
    if (n_valid > 0)
      for (int c = 0; c < C; ++c) row[c] /= n_valid;
    else
      orphan[size_t(i)] = 1;
  });
  for (auto o : orphan) res.sites_without_view += o;
  return res;
}

}  // namespace voxband

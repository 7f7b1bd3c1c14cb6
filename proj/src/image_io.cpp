#include "voxband/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "voxband/errors.hpp"

namespace voxband {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

ImageBuffer load_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open image: " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int w = int(png_get_image_width(png, info));
  const int h = int(png_get_image_height(png, info));
  const int c = int(png_get_channels(png, info));
  std::vector<std::uint8_t> row(size_t(w) * c);
  ImageBuffer img(w, h, c);
  for (int y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < c; ++k) img.at(x, y, k) = row[size_t(x) * c + k] / 255.0;
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void save_png(const std::string& path, const ImageBuffer& image) {
  if (image.channels != 1 && image.channels != 3)
    throw ConfigError("PNG output supports 1 or 3 channels");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write image: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, image.width, image.height, 8,
               image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<std::uint8_t> row(size_t(image.width) * image.channels);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x)
      for (int k = 0; k < image.channels; ++k)
        row[size_t(x) * image.channels + k] =
            std::uint8_t(std::lround(std::clamp(image.at(x, y, k), 0.0, 1.0) * 255.0));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

ImageBuffer load_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image: " + path);
  std::string magic;
  int w, h;
  double scale;
  in >> magic >> w >> h >> scale;
  if (magic != "Pf" && magic != "PF") throw IoError("not a PFM file: " + path);
  if (scale > 0) throw IoError("big-endian PFM is not supported: " + path);
  in.get();  // single whitespace after the header
  const int c = magic == "PF" ? 3 : 1;
  ImageBuffer img(w, h, c);
  std::vector<float> row(size_t(w) * c);
  // PFM stores rows bottom-up
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < c; ++k) img.at(x, y, k) = row[size_t(x) * c + k];
  }
  if (!in) throw IoError("truncated PFM file: " + path);
  return img;
}

void save_pfm(const std::string& path, const ImageBuffer& image) {
  if (image.channels != 1 && image.channels != 3)
    throw ConfigError("PFM output supports 1 or 3 channels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image: " + path);
  out << (image.channels == 3 ? "PF" : "Pf") << "\n"
      << image.width << " " << image.height << "\n-1.0\n";
  std::vector<float> row(size_t(image.width) * image.channels);
  for (int y = image.height - 1; y >= 0; --y) {
    for (int x = 0; x < image.width; ++x)
      for (int k = 0; k < image.channels; ++k)
        row[size_t(x) * image.channels + k] = float(image.at(x, y, k));
    out.write(reinterpret_cast<const char*>(row.data()),
              std::streamsize(row.size() * sizeof(float)));
  }
}

ImageBuffer load_image(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".pfm") == 0)
    return load_pfm(path);
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".png") == 0)
    return load_png(path);
  throw IoError("unsupported image format: " + path);
}

}  // namespace voxband

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>

#include "voxband/errors.hpp"
#include "voxband/features.hpp"
#include "voxband/synth.hpp"
#include "test_util.hpp"

using namespace voxband;

TEST_CASE("handcrafted: flat input has zero gradients") {
  ImageBuffer gray(64, 64, 3, 0.5);
  const FeatureMap fm = handcrafted_features(gray, 12, 64);
  REQUIRE(fm.map.channels == 12);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      for (int c = 3; c < 9; ++c) CHECK(fm.map.at(x, y, c) == doctest::Approx(0.0));
}

TEST_CASE("handcrafted: horizontal step edge peaks in Sobel-x only") {
  ImageBuffer img(64, 64, 3, 0.0);
  for (int y = 0; y < 64; ++y)
    for (int x = 32; x < 64; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = 1.0;
  const FeatureMap fm = handcrafted_features(img, 9, 64);
  double peak_x = 0, peak_y = 0;
  for (int y = 8; y < 56; ++y)
    for (int x = 8; x < 56; ++x) {
      peak_x = std::max(peak_x, std::abs(fm.map.at(x, y, 3)));  // red Sobel-x
      peak_y = std::max(peak_y, std::abs(fm.map.at(x, y, 4)));  // red Sobel-y
    }
  CHECK(peak_x > 1.0);
  CHECK(peak_y == doctest::Approx(0.0));
}

TEST_CASE("handcrafted: deterministic and resampled to the requested size") {
  std::mt19937_64 rng(41);
  ImageBuffer img(48, 40, 3);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& v : img.values) v = u(rng);
  const FeatureMap a = handcrafted_features(img, 16);
  const FeatureMap b = handcrafted_features(img, 16);
  REQUIRE(a.map.width == 256);
  REQUIRE(a.map.height == 256);
  REQUIRE(a.map.values.size() == b.map.values.size());
  for (size_t i = 0; i < a.map.values.size(); ++i) CHECK(a.map.values[i] == b.map.values[i]);
  CHECK_THROWS_AS(handcrafted_features(img, 5), ConfigError);
}

TEST_CASE("build_feature_volume: one view samples that view's map") {
  // camera at z=-100 looking along +z with identity rotation
  CameraView cam;
  cam.focal = Vec2(100, 100);
  cam.principal = Vec2(31.5, 31.5);
  cam.translation = Vec3(0, 0, 100);
  cam.width = 64;
  cam.height = 64;
  std::mt19937_64 rng(42);
  FeatureMap fm;
  fm.view = 0;
  fm.map = ImageBuffer(64, 64, 2);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& v : fm.map.values) v = u(rng);

  const VolumeSpec spec = VolumeSpec::centered_cube(40, 8);
  auto set = testutil::full_grid(8, 40.0);
  auto centered = std::make_shared<ActiveSet>(
      spec, std::vector<Vec3i>(set->sites().begin(), set->sites().end()));
  const FeatureVolumeResult res = build_feature_volume(centered, {cam}, {fm});
  CHECK(res.sites_without_view == 0);
  for (std::int64_t i = 0; i < centered->size(); ++i) {
    const Projection pr = cam.project(spec.position(centered->site(i)));
    REQUIRE(pr.valid);
    // feature map has the same size as the image here, scale is exactly 1
    const auto want = fm.map.bilinear(
        Vec2(std::min(pr.pixel.x(), 63.0), std::min(pr.pixel.y(), 63.0)));
    for (int c = 0; c < 2; ++c)
      CHECK(res.field.value(i, c) == doctest::Approx(want[size_t(c)]).epsilon(1e-9));
  }
}

TEST_CASE("build_feature_volume: mean of equal constants is the constant") {
  const auto cams = camera_ring(2, 200, 0, Vec3::Zero());
  std::vector<FeatureMap> maps(2);
  for (int v = 0; v < 2; ++v) {
    maps[size_t(v)].view = v;
    maps[size_t(v)].map = ImageBuffer(256, 256, 3, 0.75);
  }
  auto set = std::make_shared<ActiveSet>(
      VolumeSpec::centered_cube(60, 6),
      std::vector<Vec3i>{{0, 0, 0}, {3, 3, 3}, {5, 5, 5}});
  const FeatureVolumeResult res = build_feature_volume(set, cams, maps);
  for (std::int64_t i = 0; i < res.field.size(); ++i)
    for (int c = 0; c < 3; ++c) CHECK(res.field.value(i, c) == doctest::Approx(0.75));
}

TEST_CASE("build_feature_volume: 6-view loop oracle and permutation invariance") {
  std::mt19937_64 rng(43);
  const auto cams = camera_ring(6, 220, 15, Vec3::Zero());
  std::vector<FeatureMap> maps(6);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int v = 0; v < 6; ++v) {
    maps[size_t(v)].view = v;
    maps[size_t(v)].map = ImageBuffer(128, 128, 4);
    for (auto& x : maps[size_t(v)].map.values) x = u(rng);
  }
  auto set = testutil::random_set(10, 0.2, rng, 80.0);
  auto centered = std::make_shared<ActiveSet>(
      VolumeSpec::centered_cube(80, 10),
      std::vector<Vec3i>(set->sites().begin(), set->sites().end()));
  const FeatureVolumeResult res = build_feature_volume(centered, cams, maps);

  // independent per-site loop oracle
  const VolumeSpec& spec = centered->spec();
  for (std::int64_t i = 0; i < centered->size(); ++i) {
    const Vec3 p = spec.position(centered->site(i));
    std::vector<double> acc(4, 0.0);
    int n = 0;
    for (size_t v = 0; v < cams.size(); ++v) {
      const Projection pr = cams[v].project(p);
      if (!pr.valid) continue;
      const Vec2 fpix(
          std::clamp(pr.pixel.x() * 128.0 / cams[v].width, 0.0, 127.0),
          std::clamp(pr.pixel.y() * 128.0 / cams[v].height, 0.0, 127.0));
      const auto f = maps[v].map.bilinear(fpix);
      for (int c = 0; c < 4; ++c) acc[size_t(c)] += f[size_t(c)];
      ++n;
    }
    for (int c = 0; c < 4; ++c) {
      const double want = n ? acc[size_t(c)] / n : 0.0;
      CHECK(std::abs(res.field.value(i, c) - want) < 1e-9);
    }
  }

  // permuting (camera, map) pairs leaves the volume unchanged
  std::vector<size_t> perm = {3, 0, 5, 1, 4, 2};
  std::vector<CameraView> pcams;
  std::vector<FeatureMap> pmaps;
  for (size_t v : perm) {
    pcams.push_back(cams[v]);
    pmaps.push_back(maps[v]);
  }
  const FeatureVolumeResult pres = build_feature_volume(centered, pcams, pmaps);
  for (size_t i = 0; i < res.field.data().size(); ++i)
    CHECK(std::abs(res.field.data()[i] - pres.field.data()[i]) < 1e-12);
}

TEST_CASE("build_feature_volume: restriction keeps surviving site values") {
  std::mt19937_64 rng(44);
  const auto cams = camera_ring(3, 220, 0, Vec3::Zero());
  std::vector<FeatureMap> maps(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int v = 0; v < 3; ++v) {
    maps[size_t(v)].view = v;
    maps[size_t(v)].map = ImageBuffer(64, 64, 2);
    for (auto& x : maps[size_t(v)].map.values) x = u(rng);
  }
  const VolumeSpec spec = VolumeSpec::centered_cube(60, 8);
  std::vector<Vec3i> all_sites;
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y)
      for (int z = 0; z < 8; ++z) all_sites.push_back({x, y, z});
  auto full = std::make_shared<ActiveSet>(spec, all_sites);
  all_sites.resize(all_sites.size() / 3);
  auto sub = std::make_shared<ActiveSet>(spec, all_sites);
  const auto rf = build_feature_volume(full, cams, maps);
  const auto rs = build_feature_volume(sub, cams, maps);
  for (std::int64_t i = 0; i < sub->size(); ++i) {
    const std::int64_t j = full->rank_of(sub->site(i));
    for (int c = 0; c < 2; ++c) CHECK(rs.field.value(i, c) == rf.field.value(j, c));
  }
}

TEST_CASE("build_feature_volume: zero views raises ConfigError") {
  auto set = testutil::full_grid(4);
  CHECK_THROWS_AS(build_feature_volume(set, {}, {}), ConfigError);
}

TEST_CASE("extractor: deterministic replay and VBX round trip") {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  FeatureExtractor ex;
  Conv2dLayer conv;
  conv.kind = Conv2dLayer::Kind::Conv3x3;
  conv.in_channels = 3;
  conv.out_channels = 4;
  conv.relu = true;
  conv.weights.resize(9 * 3 * 4);
  conv.bias.resize(4);
  for (auto& w : conv.weights) w = u(rng);
  for (auto& b : conv.bias) b = u(rng);
  ex.layers.push_back(conv);
  ex.layers.push_back({Conv2dLayer::Kind::Downsample, 0, 0, false, {}, {}});
  ex.layers.push_back({Conv2dLayer::Kind::Upsample, 0, 0, false, {}, {}});

  ImageBuffer img(32, 32, 3);
  for (auto& v : img.values) v = u(rng) + 0.5;
  const ImageBuffer a = ex.apply(img);
  const ImageBuffer b = ex.apply(img);
  REQUIRE(a.channels == 4);
  REQUIRE(a.width == 32);
  for (size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);

  const std::string path =
      (std::filesystem::temp_directory_path() / "voxband_test.vbx").string();
  save_extractor(path, ex);
  const FeatureExtractor back = load_extractor(path);
  const ImageBuffer c = back.apply(img);
  for (size_t i = 0; i < a.values.size(); ++i)
    CHECK(std::abs(c.values[i] - a.values[i]) < 1e-5);  // float32 blob
  std::remove(path.c_str());
}

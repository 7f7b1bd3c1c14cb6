#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "voxband/errors.hpp"
#include "voxband/metrics.hpp"
#include "voxband/synth.hpp"
#include "test_util.hpp"

using namespace voxband;
using namespace voxband::testutil;

namespace {

TriangleMesh transformed(TriangleMesh m, const Mat3& R, const Vec3& t) {
  for (auto& v : m.vertices) v = R * v + t;
  return m;
}

TriangleMesh quad(double half, double tilt_deg) {
  TriangleMesh m;
  m.vertices = {Vec3(-half, -half, 0), Vec3(half, -half, 0), Vec3(half, half, 0),
                Vec3(-half, half, 0)};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  const Mat3 R = Eigen::AngleAxisd(tilt_deg * M_PI / 180.0, Vec3::UnitX()).toRotationMatrix();
  for (auto& v : m.vertices) v = R * v;
  return m;
}

}  // namespace

TEST_CASE("p2s_chamfer: identical meshes report zero everywhere") {
  const TriangleMesh m = make_icosphere(25.0, 2);
  const MeshDistanceReport r = p2s_chamfer(m, m);
  CHECK(r.p2s_precision == doctest::Approx(0.0));
  CHECK(r.p2s_recall == doctest::Approx(0.0));
  CHECK(r.chamfer_precision == doctest::Approx(0.0));
  CHECK(r.chamfer_recall == doctest::Approx(0.0));
}

TEST_CASE("p2s_chamfer: concentric spheres sit delta apart") {
  const double delta = 2.0;
  const TriangleMesh inner = make_icosphere(30.0, 3);
  const TriangleMesh outer = make_icosphere(30.0 + delta, 3);
  const MeshDistanceReport r = p2s_chamfer(outer, inner);
  // faceting sag at this tessellation is well under 0.1 cm
  CHECK(r.p2s_precision == doctest::Approx(delta).epsilon(0.05));
  CHECK(r.p2s_recall == doctest::Approx(delta).epsilon(0.05));
}

TEST_CASE("p2s_chamfer: indexed distances equal the brute-force oracle") {
  const TriangleMesh pred = make_icosphere(20.0, 1);
  TriangleMesh gt = make_icosphere(24.0, 2);
  for (auto& v : gt.vertices) v = Vec3(1.3 * v.x(), 0.8 * v.y(), v.z()) + Vec3(3, -2, 1);

  const MeshDistanceReport r = p2s_chamfer(pred, gt);
  double p2s = 0;
  for (const auto& v : pred.vertices) p2s += bf_mesh_distance(v, gt);
  p2s /= double(pred.vertices.size());
  CHECK(r.p2s_precision == doctest::Approx(p2s).epsilon(1e-9));
  double recall = 0;
  for (const auto& v : gt.vertices) recall += bf_mesh_distance(v, pred);
  recall /= double(gt.vertices.size());
  CHECK(r.p2s_recall == doctest::Approx(recall).epsilon(1e-9));

  auto nearest_vertex = [](const Vec3& p, const TriangleMesh& m) {
    double best = 1e300;
    for (const auto& v : m.vertices) best = std::min(best, (p - v).norm());
    return best;
  };
  double cp = 0, cr = 0;
  for (const auto& v : pred.vertices) cp += nearest_vertex(v, gt);
  for (const auto& v : gt.vertices) cr += nearest_vertex(v, pred);
  CHECK(r.chamfer_precision == doctest::Approx(cp / double(pred.vertices.size())).epsilon(1e-9));
  CHECK(r.chamfer_recall == doctest::Approx(cr / double(gt.vertices.size())).epsilon(1e-9));

  const MeshDistanceReport rev = p2s_chamfer(gt, pred);
  CHECK(rev.chamfer_recall == doctest::Approx(r.chamfer_precision).epsilon(1e-12));
  CHECK(rev.chamfer_precision == doctest::Approx(r.chamfer_recall).epsilon(1e-12));
}

TEST_CASE("p2s_chamfer: invariant under a shared rigid motion") {
  const TriangleMesh a = make_icosphere(20.0, 2);
  TriangleMesh b = make_icosphere(22.0, 2);
  for (auto& v : b.vertices) v += Vec3(1, 2, -1);
  const MeshDistanceReport before = p2s_chamfer(a, b);
  const Mat3 R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const Vec3 t(5, -7, 11);
  const MeshDistanceReport after = p2s_chamfer(transformed(a, R, t), transformed(b, R, t));
  CHECK(after.p2s_precision == doctest::Approx(before.p2s_precision).epsilon(1e-6));
  CHECK(after.p2s_recall == doctest::Approx(before.p2s_recall).epsilon(1e-6));
  CHECK(after.chamfer_precision == doctest::Approx(before.chamfer_precision).epsilon(1e-6));
  CHECK(after.chamfer_recall == doctest::Approx(before.chamfer_recall).epsilon(1e-6));
}

TEST_CASE("p2s_chamfer: height normalization rescales to a 1 m bounding box") {
  // same bbox height, so normalization applies one shared scale of 100/60
  const TriangleMesh a = make_icosphere(30.0, 2);
  TriangleMesh b = make_icosphere(30.0, 2);
  for (auto& v : b.vertices) v += Vec3(2, 0, 0);
  DistanceOptions opt;
  opt.normalize_height_to_1m = true;
  const MeshDistanceReport scaled = p2s_chamfer(b, a, opt);
  const MeshDistanceReport plain = p2s_chamfer(b, a);
  CHECK(scaled.p2s_precision ==
        doctest::Approx(plain.p2s_precision * 100.0 / 60.0).epsilon(1e-9));
  CHECK(scaled.chamfer_recall ==
        doctest::Approx(plain.chamfer_recall * 100.0 / 60.0).epsilon(1e-9));
}

TEST_CASE("normal_error: tilted plane reads the tilt angle") {
  const std::vector<CameraView> cams = camera_ring(1, 200, 0, Vec3::Zero());
  const TriangleMesh flat = quad(40.0, 0.0);
  const TriangleMesh tilted = quad(40.0, 10.0);
  const double err = normal_error(tilted, flat, cams);
  CHECK(err == doctest::Approx(10.0).epsilon(0.05));
  CHECK(normal_error(flat, flat, cams) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("psnr: exact cases, monotonicity, mismatch") {
  const ImageBuffer zero(32, 32, 3, 0.0);
  const ImageBuffer tenth(32, 32, 3, 0.1);
  CHECK(psnr(zero, zero) == doctest::Approx(99.0));
  CHECK(psnr(zero, tenth) == doctest::Approx(20.0).epsilon(1e-12));

  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> u(0, 1);
  ImageBuffer base(32, 32, 3);
  for (auto& v : base.values) v = u(rng);
  auto noisy = [&](double amp) {
    ImageBuffer n = base;
    std::mt19937_64 r2(82);
    std::uniform_real_distribution<double> d(-amp, amp);
    for (auto& v : n.values) v = std::clamp(v + d(r2), 0.0, 1.0);
    return n;
  };
  CHECK(psnr(base, noisy(0.02)) > psnr(base, noisy(0.1)));
  CHECK_THROWS_AS(psnr(zero, ImageBuffer(16, 16, 3)), ConfigError);
}

TEST_CASE("ssim: unit on identity, loop oracle within 1e-6, noise ordering") {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> u(0, 1);
  ImageBuffer a(24, 24, 3), b(24, 24, 3);
  for (auto& v : a.values) v = u(rng);
  for (size_t i = 0; i < b.values.size(); ++i)
    b.values[i] = std::clamp(a.values[i] + 0.1 * (u(rng) - 0.5), 0.0, 1.0);

  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));

  // independent loop oracle with the published constants
  auto lum = [](const ImageBuffer& img, int x, int y) {
    return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
  };
  const double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03;
  double kernel[11][11], ksum = 0;
  for (int j = -5; j <= 5; ++j)
    for (int i = -5; i <= 5; ++i) {
      kernel[j + 5][i + 5] = std::exp(-(i * i + j * j) / 4.5);
      ksum += kernel[j + 5][i + 5];
    }
  for (auto& row : kernel)
    for (auto& k : row) k /= ksum;
  auto ci = [](int v, int n) { return std::clamp(v, 0, n - 1); };
  double want = 0;
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x) {
      double ma = 0, mb = 0;
      for (int j = -5; j <= 5; ++j)
        for (int i = -5; i <= 5; ++i) {
          ma += kernel[j + 5][i + 5] * lum(a, ci(x + i, 24), ci(y + j, 24));
          mb += kernel[j + 5][i + 5] * lum(b, ci(x + i, 24), ci(y + j, 24));
        }
      double va = 0, vb = 0, cov = 0;
      for (int j = -5; j <= 5; ++j)
        for (int i = -5; i <= 5; ++i) {
          const double da = lum(a, ci(x + i, 24), ci(y + j, 24)) - ma;
          const double db = lum(b, ci(x + i, 24), ci(y + j, 24)) - mb;
          va += kernel[j + 5][i + 5] * da * da;
          vb += kernel[j + 5][i + 5] * db * db;
          cov += kernel[j + 5][i + 5] * da * db;
        }
      want += ((2 * ma * mb + C1) * (2 * cov + C2)) /
              ((ma * ma + mb * mb + C1) * (va + vb + C2));
    }
  want /= 24.0 * 24.0;
  CHECK(std::abs(ssim(a, b) - want) < 1e-6);

  ImageBuffer worse = a;
  std::mt19937_64 r3(84);
  std::uniform_real_distribution<double> d(-0.3, 0.3);
  for (auto& v : worse.values) v = std::clamp(v + d(r3), 0.0, 1.0);
  CHECK(ssim(a, worse) < ssim(a, b));
  CHECK_THROWS_AS(ssim(a, ImageBuffer(16, 16, 3)), ConfigError);
}

TEST_CASE("reports: JSON parses and CSV carries the four distances") {
  MeshDistanceReport r;
  r.p2s_precision = 0.125;
  r.p2s_recall = 0.25;
  r.chamfer_precision = 0.5;
  r.chamfer_recall = 1.0;
  const auto doc = nlohmann::json::parse(report_json(r));
  CHECK(doc["p2s_precision_cm"].get<double>() == doctest::Approx(0.125));
  CHECK(doc["p2s_recall_cm"].get<double>() == doctest::Approx(0.25));
  const std::string csv = report_csv(r);
  CHECK(csv.find("0.125") != std::string::npos);
  CHECK(csv.find("0.25") != std::string::npos);
  CHECK(csv.find("0.5") != std::string::npos);
  CHECK(csv.find(',') != std::string::npos);
}

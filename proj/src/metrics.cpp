#include "voxband/metrics.hpp"

#include <cmath>
#include <sstream>

#include "voxband/bucket_grid.hpp"
#include "voxband/errors.hpp"
#include "voxband/parallel.hpp"
#include "voxband/synth.hpp"

namespace voxband {

namespace {

TriangleMesh height_normalized(const TriangleMesh& mesh) {
  TriangleMesh out = mesh;
  const double h = mesh.bbox_max().y() - mesh.bbox_min().y();
  if (h <= 0) throw ValidationError("degenerate mesh height");
  const double s = 100.0 / h;
  for (auto& v : out.vertices) v *= s;
  return out;
}

std::vector<Vec3> query_points(const TriangleMesh& mesh, const DistanceOptions& opt,
                               std::uint64_t seed_offset) {
  if (!opt.area_weighted_samples) return mesh.vertices;
  std::vector<Vec3> pts;
  for (const auto& s : sample_surface(mesh, opt.sample_count, opt.seed + seed_offset))
    pts.push_back(s.point);
  return pts;
}

double mean_point_to_surface(const std::vector<Vec3>& points, const BucketGrid& grid) {
  std::vector<double> d(points.size());
  parallel_for(0, std::int64_t(points.size()),
               [&](std::int64_t i) { d[size_t(i)] = grid.closest(points[size_t(i)]).distance; });
  double sum = 0;
  for (double v : d) sum += v;
  return sum / double(points.size());
}

// Uniform point grid with expanding-shell nearest search; results match the
// exhaustive scan exactly.
class PointGrid {
 public:
  explicit PointGrid(const std::vector<Vec3>& points) : points_(points) {
    lo_ = hi_ = points[0];
    for (const auto& p : points) {
      lo_ = lo_.cwiseMin(p);
      hi_ = hi_.cwiseMax(p);
    }
    lo_ -= Vec3::Constant(1e-6);
    hi_ += Vec3::Constant(1e-6);
    const double extent = (hi_ - lo_).maxCoeff();
    res_ = std::clamp(int(std::cbrt(double(points.size()))), 1, 128);
    cell_ = extent / res_;
    if (cell_ <= 0) cell_ = 1.0;
    buckets_.resize(size_t(res_) * res_ * res_);
    for (size_t i = 0; i < points.size(); ++i) {
      const Vec3i c = cell_of(points[i]);
      buckets_[index(c)].push_back(int(i));
    }
  }

  double nearest_distance(const Vec3& p) const {
    const Vec3i c0 = cell_of(p);
    double best = std::numeric_limits<double>::max();
    for (int r = 0;; ++r) {
      if (best < std::numeric_limits<double>::max() && r > 1 && (r - 1) * cell_ > std::sqrt(best))
        return std::sqrt(best);
      bool any_cell = false;
      for (int x = c0.x() - r; x <= c0.x() + r; ++x)
        for (int y = c0.y() - r; y <= c0.y() + r; ++y)
          for (int z = c0.z() - r; z <= c0.z() + r; ++z) {
            if (std::max({std::abs(x - c0.x()), std::abs(y - c0.y()), std::abs(z - c0.z())}) != r)
              continue;
            if (x < 0 || y < 0 || z < 0 || x >= res_ || y >= res_ || z >= res_) continue;
            any_cell = true;
            for (int idx : buckets_[index(Vec3i(x, y, z))])
              best = std::min(best, (points_[size_t(idx)] - p).squaredNorm());
          }
      if (!any_cell && r > res_) return std::sqrt(best);
    }
  }

 private:
  Vec3i cell_of(const Vec3& p) const {
    Vec3i c;
    for (int a = 0; a < 3; ++a)
      c[a] = std::clamp(int((p[a] - lo_[a]) / cell_), 0, res_ - 1);
    return c;
  }
  size_t index(const Vec3i& c) const {
    return (size_t(c.x()) * res_ + c.y()) * res_ + c.z();
  }

  const std::vector<Vec3>& points_;
  Vec3 lo_, hi_;
  double cell_ = 1.0;
  int res_ = 1;
  std::vector<std::vector<int>> buckets_;
};

double mean_point_to_points(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  const PointGrid grid(to);
  std::vector<double> d(from.size());
  parallel_for(0, std::int64_t(from.size()),
               [&](std::int64_t i) { d[size_t(i)] = grid.nearest_distance(from[size_t(i)]); });
  double sum = 0;
  for (double v : d) sum += v;
  return sum / double(from.size());
}

}  // namespace

MeshDistanceReport p2s_chamfer(const TriangleMesh& pred, const TriangleMesh& gt,
                               const DistanceOptions& options) {
  if (pred.empty() || gt.empty()) throw ValidationError("cannot evaluate an empty mesh");
  const TriangleMesh p = options.normalize_height_to_1m ? height_normalized(pred) : pred;
  const TriangleMesh g = options.normalize_height_to_1m ? height_normalized(gt) : gt;
  const BucketGrid pred_grid(p), gt_grid(g);
  const std::vector<Vec3> pq = query_points(p, options, 0);
  const std::vector<Vec3> gq = query_points(g, options, 1);
  MeshDistanceReport r;
  r.p2s_precision = mean_point_to_surface(pq, gt_grid);
  r.p2s_recall = mean_point_to_surface(gq, pred_grid);
  r.chamfer_precision = mean_point_to_points(p.vertices, g.vertices);
  r.chamfer_recall = mean_point_to_points(g.vertices, p.vertices);
  return r;
}

double normal_error(const TriangleMesh& pred, const TriangleMesh& gt,
                    const std::vector<CameraView>& cameras) {
  if (cameras.empty()) throw ConfigError("normal error needs at least one camera");
  double sum = 0;
  std::int64_t count = 0;
  for (const auto& cam : cameras) {
    const RenderedView a = render_view(pred, cam);
    const RenderedView b = render_view(gt, cam);
    for (int y = 0; y < cam.height; ++y)
      for (int x = 0; x < cam.width; ++x) {
        if (a.mask.at(x, y, 0) < 0.5 || b.mask.at(x, y, 0) < 0.5) continue;
        Vec3 na, nb;
        for (int c = 0; c < 3; ++c) {
          na[c] = a.normal.at(x, y, c) * 2.0 - 1.0;
          nb[c] = b.normal.at(x, y, c) * 2.0 - 1.0;
        }
        if (na.norm() < 1e-9 || nb.norm() < 1e-9) continue;
        const double cosang =
            std::clamp(na.normalized().dot(nb.normalized()), -1.0, 1.0);
        sum += std::acos(cosang) * 180.0 / M_PI;
        ++count;
      }
  }
  if (count == 0) throw NumericError("no overlapping pixels between the rendered meshes");
  return sum / double(count);
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw ConfigError("psnr image size mismatch");
  double mse = 0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    mse += d * d;
  }
  mse /= double(a.values.size());
  if (mse <= 0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

namespace {

ImageBuffer luminance(const ImageBuffer& img) {
  if (img.channels == 1) return img;
  ImageBuffer out(img.width, img.height, 1);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out.at(x, y, 0) =
          0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
  return out;
}

}  // namespace

double ssim(const ImageBuffer& a_in, const ImageBuffer& b_in) {
  if (a_in.width != b_in.width || a_in.height != b_in.height ||
      a_in.channels != b_in.channels)
    throw ConfigError("ssim image size mismatch");
  const ImageBuffer a = luminance(a_in), b = luminance(b_in);
  constexpr int R = 5;  // 11x11 window
  constexpr double sigma = 1.5;
  double kernel[11][11];
  double ksum = 0;
  for (int j = -R; j <= R; ++j)
    for (int i = -R; i <= R; ++i) {
      kernel[j + R][i + R] = std::exp(-(i * i + j * j) / (2.0 * sigma * sigma));
      ksum += kernel[j + R][i + R];
    }
  for (auto& row : kernel)
    for (auto& k : row) k /= ksum;
  constexpr double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03;

  auto clampi = [](int v, int n) { return std::clamp(v, 0, n - 1); };
  double sum = 0;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) {
      double mu_a = 0, mu_b = 0;
      for (int j = -R; j <= R; ++j)
        for (int i = -R; i <= R; ++i) {
          const double k = kernel[j + R][i + R];
          mu_a += k * a.at(clampi(x + i, a.width), clampi(y + j, a.height), 0);
          mu_b += k * b.at(clampi(x + i, a.width), clampi(y + j, a.height), 0);
        }
      double va = 0, vb = 0, cov = 0;
      for (int j = -R; j <= R; ++j)
        for (int i = -R; i <= R; ++i) {
          const double k = kernel[j + R][i + R];
          const double da = a.at(clampi(x + i, a.width), clampi(y + j, a.height), 0) - mu_a;
          const double db = b.at(clampi(x + i, a.width), clampi(y + j, a.height), 0) - mu_b;
          va += k * da * da;
          vb += k * db * db;
          cov += k * da * db;
        }
      sum += ((2 * mu_a * mu_b + C1) * (2 * cov + C2)) /
             ((mu_a * mu_a + mu_b * mu_b + C1) * (va + vb + C2));
    }
  return sum / double(a.width * a.height);
}

std::string report_json(const MeshDistanceReport& r) {
  std::ostringstream out;
  out.precision(9);
  out << "{\n  \"p2s_precision_cm\": " << r.p2s_precision
      << ",\n  \"p2s_recall_cm\": " << r.p2s_recall
      << ",\n  \"chamfer_precision_cm\": " << r.chamfer_precision
      << ",\n  \"chamfer_recall_cm\": " << r.chamfer_recall << "\n}\n";
  return out.str();
}

std::string report_csv(const MeshDistanceReport& r) {
  std::ostringstream out;
  out.precision(9);
  out << "p2s_precision_cm,p2s_recall_cm,chamfer_precision_cm,chamfer_recall_cm\n"
      << r.p2s_precision << "," << r.p2s_recall << "," << r.chamfer_precision << ","
      << r.chamfer_recall << "\n";
  return out.str();
}

}  // namespace voxband

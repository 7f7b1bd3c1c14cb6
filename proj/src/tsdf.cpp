#include "voxband/tsdf.hpp"

#include <cmath>
#include <sstream>

#include "voxband/errors.hpp"
#include "voxband/parallel.hpp"

namespace voxband {

ActiveSet mesh_band_active_set(const TriangleMesh& mesh, const VolumeSpec& spec,
                               double radius_cm) {
  const int R = spec.resolution;
  const double h = spec.spacing();
  std::vector<std::uint8_t> mark(size_t(R) * R * R, 0);
  const double pad = radius_cm + h;  // one extra cell so trilinear corners resolve
  for (const auto& t : mesh.triangles) {
    Vec3 lo = mesh.vertices[t[0]].cwiseMin(mesh.vertices[t[1]]).cwiseMin(mesh.vertices[t[2]]);
    Vec3 hi = mesh.vertices[t[0]].cwiseMax(mesh.vertices[t[1]]).cwiseMax(mesh.vertices[t[2]]);
    lo -= Vec3::Constant(pad);
    hi += Vec3::Constant(pad);
    Vec3i c0, c1;
    for (int a = 0; a < 3; ++a) {
      c0[a] = std::clamp(int(std::floor((lo[a] - spec.origin[a]) / h - 0.5)), 0, R - 1);
      c1[a] = std::clamp(int(std::ceil((hi[a] - spec.origin[a]) / h - 0.5)), 0, R - 1);
    }
    for (int x = c0.x(); x <= c1.x(); ++x)
      for (int y = c0.y(); y <= c1.y(); ++y)
        for (int z = c0.z(); z <= c1.z(); ++z) mark[(size_t(x) * R + y) * R + z] = 1;
  }
  std::vector<Vec3i> sites;
  for (int x = 0; x < R; ++x)
    for (int y = 0; y < R; ++y)
      for (int z = 0; z < R; ++z)
        if (mark[(size_t(x) * R + y) * R + z]) sites.emplace_back(x, y, z);
  return ActiveSet(spec, std::move(sites));
}

TsdfVolume mesh_to_tsdf(const TriangleMesh& mesh, ActiveSetPtr active, double truncation_cm) {
  if (!active || active->empty()) throw ConfigError("mesh_to_tsdf needs a non-empty active set");
  const auto bad = non_manifold_edges(mesh);
  if (bad.size() > std::max<size_t>(1, mesh.triangles.size()) * 3 / 50) {
    std::ostringstream msg;
    msg << "mesh too open for parity signing; " << bad.size() << " non-manifold edges:";
    for (size_t i = 0; i < bad.size() && i < 16; ++i)
      msg << " (" << bad[i].first << "," << bad[i].second << ")";
    throw ValidationError(msg.str());
  }

  const BucketGrid grid(mesh);
  TsdfVolume out{SparseField(active, 1, truncation_cm), truncation_cm};
  const VolumeSpec& spec = active->spec();
  parallel_for(0, active->size(), [&](std::int64_t i) {
    const Vec3 p = spec.position(active->site(i));
    const double dist = std::min(grid.closest(p).distance, truncation_cm);
    out.field.value(i, 0) = grid.inside(p) ? -dist : dist;
  });
  return out;
}

QuantizationResult quantization_error(const TriangleMesh& mesh, const TsdfVolume& tsdf,
                                      int n_samples, std::uint64_t seed) {
  if (n_samples < 1000) throw ConfigError("quantization study needs at least 1000 samples");
  const auto samples = sample_surface(mesh, n_samples, seed);
  const VolumeSpec& spec = tsdf.active().spec();
  std::vector<double> errs(samples.size(), -1.0);
  parallel_for(0, std::int64_t(samples.size()), [&](std::int64_t i) {
    if (spec.contains(samples[i].point))
      errs[i] = std::abs(tsdf.field.trilinear(samples[i].point)[0]);
  });
  QuantizationResult res;
  double sum = 0;
  for (double e : errs) {
    if (e < 0) {
      ++res.skipped_samples;
    } else {
      sum += e;
      ++res.effective_samples;
    }
  }
  if (res.skipped_samples * 100 > n_samples)
    throw NumericError("TSDF volume does not cover the mesh (over 1% of samples skipped)");
  res.mean_abs_error_cm = res.effective_samples ? sum / res.effective_samples : 0.0;
  return res;
}

}  // namespace voxband

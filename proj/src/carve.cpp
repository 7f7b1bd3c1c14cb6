#include "voxband/carve.hpp"

#include <atomic>

#include "voxband/errors.hpp"
#include "voxband/parallel.hpp"

namespace voxband {

ActiveSet carve_visual_hull(const VolumeSpec& spec,
                            const std::vector<CameraView>& cameras,
                            const std::vector<ImageBuffer>& masks,
                            std::optional<DepthBand> single_view_depth_band) {
  if (cameras.empty()) throw ConfigError("visual hull carving needs at least one view");
  if (cameras.size() != masks.size())
    throw ConfigError("camera and mask counts do not match");
  for (const auto& m : masks)
    if (m.channels != 1) throw ConfigError("masks must be 1-channel binary images");

  const bool single_view = cameras.size() == 1;
  DepthBand band = single_view_depth_band.value_or(DepthBand{});
  double center_depth = 0;
  if (single_view) {
    const Vec3 center = spec.origin + Vec3::Constant(spec.edge / 2.0);
    center_depth = cameras[0].to_camera(center).z();
  }

  const int R = spec.resolution;
  std::vector<std::uint8_t> inside(size_t(R) * R * R, 0);
  parallel_for(0, std::int64_t(R) * R, [&](std::int64_t wh) {
    const int w = int(wh / R), h = int(wh % R);
    for (int d = 0; d < R; ++d) {
      const Vec3 p = spec.position(w, h, d);
      bool keep = true;
      for (size_t v = 0; v < cameras.size() && keep; ++v) {
        const Projection pr = cameras[v].project(p);
        // out-of-frame counts as outside the hull
        if (!pr.valid || masks[v].nearest(pr.pixel)[0] <= 0.5) keep = false;
        if (keep && single_view &&
            (pr.depth < center_depth + band.near_cm || pr.depth > center_depth + band.far_cm))
          keep = false;
      }
      if (keep) inside[(size_t(w) * R + h) * R + d] = 1;
    }
  });

  std::vector<Vec3i> sites;
  for (int w = 0; w < R; ++w)
    for (int h = 0; h < R; ++h)
      for (int d = 0; d < R; ++d)
        if (inside[(size_t(w) * R + h) * R + d]) sites.emplace_back(w, h, d);
  if (sites.empty()) throw NumericError("visual hull is empty");
  return ActiveSet(spec, std::move(sites));
}

}  // namespace voxband

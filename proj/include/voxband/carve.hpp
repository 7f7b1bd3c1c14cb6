#pragma once

#include <optional>
#include <vector>

#include "voxband/active_set.hpp"
#include "voxband/camera.hpp"
#include "voxband/image.hpp"

namespace voxband {

// Depth window about the volume-center depth, used to truncate the single-view
// silhouette cone. Defaults to +/- 50 cm.
struct DepthBand {
  double near_cm = -50.0;
  double far_cm = 50.0;
};

// Silhouette carving: a vertex stays active iff every view projects it inside
// the frame onto a foreground mask texel (nearest-neighbor, strict > 0.5).
// With a single view the depth band about the volume-center depth applies too.
ActiveSet carve_visual_hull(const VolumeSpec& spec,
                            const std::vector<CameraView>& cameras,
                            const std::vector<ImageBuffer>& masks,
                            std::optional<DepthBand> single_view_depth_band = std::nullopt);

}  // namespace voxband

#pragma once

#include <optional>

#include "voxband/tsdf.hpp"

namespace voxband {

// Standard 256-case marching cubes over cells touching the active set.
// Corners missing from the active set take the trilinear value of
// coarse_fallback (clamped to +/- truncation) when provided, else +truncation.
// Shared edge vertices are welded, so closed bands yield watertight meshes.
// Triangles are oriented with normals pointing toward positive values.
TriangleMesh extract_mesh(const TsdfVolume& tsdf,
                          const TsdfVolume* coarse_fallback = nullptr);

}  // namespace voxband

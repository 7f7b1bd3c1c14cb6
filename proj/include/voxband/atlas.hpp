#pragma once

#include <string>
#include <vector>

#include "voxband/camera.hpp"
#include "voxband/image.hpp"
#include "voxband/mesh.hpp"
#include "voxband/sparse_field.hpp"

namespace voxband {

inline const Vec3 kHoleColor = Vec3(1.0, 0.0, 1.0);  // unobserved surface marker

// Per-triangle charts, greedy shelf packing with 2-texel gutters. The output
// mesh duplicates vertices per triangle so every corner carries its own UV
// (OBJ convention, v up).
struct AtlasResult {
  ImageBuffer atlas;  // 3 channels
  TriangleMesh mesh;  // uvs filled, 3 vertices per triangle
  double texels_per_cm = 0;
};

AtlasResult bake_atlas(const TriangleMesh& mesh, const SparseField& weights,
                       const std::vector<CameraView>& cameras,
                       const std::vector<ImageBuffer>& images, int atlas_resolution);

// Ray-cast the baked mesh into a camera, sampling the atlas bilinearly.
ImageBuffer render_atlas_view(const AtlasResult& baked, const CameraView& camera);

// Writes <stem>.obj, <stem>.mtl and <stem>.png into dir.
void save_textured_obj(const std::string& dir, const std::string& stem,
                       const AtlasResult& baked);

}  // namespace voxband

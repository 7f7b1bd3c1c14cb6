#pragma once

#include <vector>

#include "voxband/camera.hpp"
#include "voxband/image.hpp"
#include "voxband/mesh.hpp"

namespace voxband {

// Miss sentinel written into depth maps.
inline constexpr double kDepthInfinity = 3.4e38;

struct RingIntrinsics {
  Vec2 focal = Vec2(600, 600);
  int width = 512;
  int height = 512;
  // principal point defaults to the image center
};

// n cameras equally spaced in azimuth at the given ring radius/height (cm),
// all aimed at look_at. Azimuth 0 sits on the +z axis.
std::vector<CameraView> camera_ring(int n, double radius_cm, double height_cm,
                                    const Vec3& look_at, const RingIntrinsics& intr = {});

struct RenderedView {
  ImageBuffer color;   // 3ch, vertex color x Lambertian headlight
  ImageBuffer depth;   // 1ch, camera-space z in cm; kDepthInfinity on miss
  ImageBuffer normal;  // 3ch, camera-space normal encoded (n+1)/2
  ImageBuffer mask;    // 1ch, hit indicator
};

// Deterministic nearest-hit ray casting. Uses per-vertex colors/normals when
// present, else white / area-weighted vertex normals.
RenderedView render_view(const TriangleMesh& mesh, const CameraView& camera);
std::vector<RenderedView> render_views(const TriangleMesh& mesh,
                                       const std::vector<CameraView>& cameras);

// Procedural test shapes (watertight, centered near the origin, cm scale).
TriangleMesh make_icosphere(double radius_cm, int subdivisions,
                            const Vec3& color = Vec3(1, 1, 1));
// Capsule-skeleton figure about 150 cm tall standing along +y.
TriangleMesh make_humanoid(double grid_spacing_cm = 1.0);

// Analytic signed distance of the humanoid skeleton (negative inside);
// make_humanoid meshes its zero set.
double humanoid_distance(const Vec3& p);

}  // namespace voxband

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "voxband/geometry.hpp"

namespace voxband {

// Indexed triangle soup in cm. Colors in [0,1], normals unit length.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> colors;   // optional, per vertex
  std::vector<Vec3> normals;  // optional, per vertex
  std::vector<Vec2> uvs;      // optional, per vertex (atlas output)

  bool empty() const { return vertices.empty() || triangles.empty(); }

  // Throws on out-of-range indices; drops degenerate triangles (area <= 1e-10 cm^2).
  void validate();

  Vec3 triangle_point(int tri, double b0, double b1) const {
    const auto& t = triangles[tri];
    return vertices[t[0]] * b0 + vertices[t[1]] * b1 +
           vertices[t[2]] * (1.0 - b0 - b1);
  }

  double triangle_area(int tri) const {
    const auto& t = triangles[tri];
    return 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
  }

  Vec3 face_normal(int tri) const;

  Vec3 bbox_min() const;
  Vec3 bbox_max() const;
};

// Area-weighted average of incident face normals; zero accumulations fall back to +z.
std::vector<Vec3> mesh_vertex_normals(const TriangleMesh& mesh);

// Deterministic area-weighted uniform surface samples (barycentric draw per triangle).
struct SurfaceSample {
  Vec3 point;
  Vec3 normal;  // face normal
  int triangle;
};
std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, int n, std::uint64_t seed);

// Edge-manifold check: returns edges not shared by exactly two triangles.
std::vector<std::pair<int, int>> non_manifold_edges(const TriangleMesh& mesh);

}  // namespace voxband

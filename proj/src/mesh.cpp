#include "voxband/mesh.hpp"

#include <map>
#include <random>

#include "voxband/errors.hpp"

namespace voxband {

void TriangleMesh::validate() {
  const int nv = int(vertices.size());
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k)
      if (t[k] < 0 || t[k] >= nv)
        throw ValidationError("triangle index out of range");
  std::vector<std::array<int, 3>> kept;
  kept.reserve(triangles.size());
  for (size_t i = 0; i < triangles.size(); ++i)
    if (triangle_area(int(i)) > 1e-10) kept.push_back(triangles[i]);
  triangles = std::move(kept);
}

Vec3 TriangleMesh::face_normal(int tri) const {
  const auto& t = triangles[tri];
  const Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
  const double len = n.norm();
  return len > 0 ? Vec3(n / len) : Vec3(0, 0, 1);
}

Vec3 TriangleMesh::bbox_min() const {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
  for (const auto& v : vertices) lo = lo.cwiseMin(v);
  return lo;
}

Vec3 TriangleMesh::bbox_max() const {
  Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());
  for (const auto& v : vertices) hi = hi.cwiseMax(v);
  return hi;
}

std::vector<Vec3> mesh_vertex_normals(const TriangleMesh& mesh) {
  std::vector<Vec3> acc(mesh.vertices.size(), Vec3::Zero());
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    // cross product magnitude = 2 * area, so this is the area-weighted sum
    const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                       .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    for (int k = 0; k < 3; ++k) acc[t[k]] += n;
  }
  for (auto& n : acc) {
    const double len = n.norm();
    n = len > 1e-14 ? Vec3(n / len) : Vec3(0, 0, 1);
  }
  return acc;
}

std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, int n, std::uint64_t seed) {
  std::vector<double> cdf(mesh.triangles.size());
  double total = 0;
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    total += mesh.triangle_area(int(i));
    cdf[i] = total;
  }
  if (total <= 0) throw ValidationError("mesh has zero surface area");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<SurfaceSample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double r = uni(rng) * total;
    const int tri = int(std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
    double u = uni(rng), v = uni(rng);
    if (u + v > 1) {
      u = 1 - u;
      v = 1 - v;
    }
    out.push_back({mesh.triangle_point(tri, 1 - u - v, u), mesh.face_normal(tri), tri});
  }
  return out;
}

std::vector<std::pair<int, int>> non_manifold_edges(const TriangleMesh& mesh) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      count[{a, b}]++;
    }
  std::vector<std::pair<int, int>> bad;
  for (const auto& [e, c] : count)
    if (c != 2) bad.push_back(e);
  return bad;
}

}  // namespace voxband

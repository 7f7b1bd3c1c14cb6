#pragma once

#include <limits>
#include <vector>

#include "voxband/mesh.hpp"

namespace voxband {

struct ClosestPoint {
  double distance = std::numeric_limits<double>::max();
  Vec3 point = Vec3::Zero();
  int triangle = -1;
  Vec3 barycentric = Vec3::Zero();
};

struct RayHit {
  bool hit = false;
  double t = std::numeric_limits<double>::max();
  int triangle = -1;
  Vec3 barycentric = Vec3::Zero();
};

// Exact distance and closest point from p to triangle (a,b,c).
ClosestPoint point_triangle_closest(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Moller-Trumbore, front and back faces both count.
bool ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                  const Vec3& c, double& t, Vec3& bary);

// Uniform triangle bucket grid. Queries are output-identical to looping over
// every triangle; the grid only prunes the search.
class BucketGrid {
 public:
  explicit BucketGrid(const TriangleMesh& mesh, int target_cells_per_axis = 64);

  const TriangleMesh& mesh() const { return *mesh_; }

  ClosestPoint closest(const Vec3& p) const;

  // Nearest intersection along a ray.
  RayHit raycast(const Vec3& origin, const Vec3& dir) const;

  // Crossing count of the axis-aligned ray from p toward +axis.
  int count_crossings(const Vec3& p, int axis) const;

  // Ray-parity inside test with 3-axis majority vote.
  bool inside(const Vec3& p) const;

 private:
  Vec3i cell_of(const Vec3& p) const;
  const std::vector<int>& bucket(int x, int y, int z) const {
    return buckets_[(size_t(x) * res_ + y) * res_ + z];
  }

  const TriangleMesh* mesh_;
  Vec3 lo_, hi_;
  double cell_ = 1.0;
  int res_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace voxband

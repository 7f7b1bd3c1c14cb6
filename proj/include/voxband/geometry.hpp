#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstdint>

namespace voxband {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;
using Mat3 = Eigen::Matrix3d;

// Cubic sample grid. Samples sit at cell centers: index i maps to
// origin + (i + 0.5) * h per axis, h = edge / resolution. All units cm.
struct VolumeSpec {
  Vec3 origin = Vec3::Zero();
  double edge = 256.0;
  int resolution = 256;

  double spacing() const { return edge / resolution; }

  Vec3 position(int w, int h, int d) const {
    const double s = spacing();
    return origin + Vec3((w + 0.5) * s, (h + 0.5) * s, (d + 0.5) * s);
  }
  Vec3 position(const Vec3i& idx) const { return position(idx.x(), idx.y(), idx.z()); }

  bool contains(const Vec3& p) const {
    const Vec3 q = p - origin;
    return q.x() >= 0 && q.y() >= 0 && q.z() >= 0 &&
           q.x() < edge && q.y() < edge && q.z() < edge;
  }

  // Continuous grid coordinate of a world point (0 maps to the first sample).
  Vec3 grid_coord(const Vec3& p) const { return (p - origin) / spacing() - Vec3::Constant(0.5); }

  bool same_geometry(const VolumeSpec& o) const {
    return (origin - o.origin).norm() < 1e-9 && std::abs(edge - o.edge) < 1e-9;
  }

  // Default 256 cm cube centered at the world origin.
  static VolumeSpec centered_cube(double edge_cm, int res) {
    return VolumeSpec{Vec3::Constant(-edge_cm / 2.0), edge_cm, res};
  }
};

inline std::uint64_t pack_index(int w, int h, int d) {
  return (std::uint64_t(std::uint32_t(w)) << 42) |
         (std::uint64_t(std::uint32_t(h)) << 21) |
         std::uint64_t(std::uint32_t(d));
}

}  // namespace voxband

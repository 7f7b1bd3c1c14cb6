#include "voxband/synth.hpp"

#include <cmath>
#include <map>

#include "voxband/bucket_grid.hpp"
#include "voxband/errors.hpp"
#include "voxband/marching_cubes.hpp"
#include "voxband/parallel.hpp"

namespace voxband {

std::vector<CameraView> camera_ring(int n, double radius_cm, double height_cm,
                                    const Vec3& look_at, const RingIntrinsics& intr) {
  if (n < 1) throw ConfigError("camera ring needs at least one view");
  std::vector<CameraView> cams;
  cams.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double az = 2.0 * M_PI * k / n;
    const Vec3 center = look_at + Vec3(radius_cm * std::sin(az), height_cm,
                                       radius_cm * std::cos(az));
    const Vec3 fwd = (look_at - center).normalized();
    const Vec3 up(0, 1, 0);
    Vec3 right = up.cross(fwd);
    if (right.norm() < 1e-9) right = Vec3(1, 0, 0);
    right.normalize();
    const Vec3 down = fwd.cross(right);
    CameraView cam;
    cam.rotation.row(0) = right;
    cam.rotation.row(1) = down;
    cam.rotation.row(2) = fwd;
    cam.translation = -cam.rotation * center;
    cam.focal = intr.focal;
    cam.width = intr.width;
    cam.height = intr.height;
    cam.principal = Vec2((intr.width - 1) / 2.0, (intr.height - 1) / 2.0);
    cam.validate();
    cams.push_back(cam);
  }
  return cams;
}

RenderedView render_view(const TriangleMesh& mesh, const CameraView& camera) {
  const BucketGrid grid(mesh);
  const std::vector<Vec3> vnormals =
      mesh.normals.size() == mesh.vertices.size() ? mesh.normals : mesh_vertex_normals(mesh);
  const bool colored = mesh.colors.size() == mesh.vertices.size();
  const Vec3 eye = camera.center();
  const int W = camera.width, H = camera.height;
  RenderedView out{ImageBuffer(W, H, 3), ImageBuffer(W, H, 1, kDepthInfinity),
                   ImageBuffer(W, H, 3, 0.5), ImageBuffer(W, H, 1)};
  parallel_for(0, std::int64_t(W) * H, [&](std::int64_t px) {
    const int x = int(px % W), y = int(px / W);
    const Vec3 dir_cam((x - camera.principal.x()) / camera.focal.x(),
                       (y - camera.principal.y()) / camera.focal.y(), 1.0);
    const Vec3 dir = (camera.rotation.transpose() * dir_cam).normalized();
    const RayHit hit = grid.raycast(eye, dir);
    if (!hit.hit) return;
    const Vec3 p = eye + dir * hit.t;
    const auto& tv = mesh.triangles[hit.triangle];
    Vec3 n = hit.barycentric.x() * vnormals[tv[0]] + hit.barycentric.y() * vnormals[tv[1]] +
             hit.barycentric.z() * vnormals[tv[2]];
    const double nl = n.norm();
    n = nl > 1e-12 ? Vec3(n / nl) : mesh.face_normal(hit.triangle);
    Vec3 base = Vec3(1, 1, 1);
    if (colored)
      base = hit.barycentric.x() * mesh.colors[tv[0]] + hit.barycentric.y() * mesh.colors[tv[1]] +
             hit.barycentric.z() * mesh.colors[tv[2]];
    const double shade = std::clamp(std::abs(n.dot(-dir)), 0.0, 1.0);
    const Vec3 n_cam = camera.rotation * n;
    for (int c = 0; c < 3; ++c) {
      out.color.at(x, y, c) = std::clamp(base[c] * shade, 0.0, 1.0);
      out.normal.at(x, y, c) = (n_cam[c] + 1.0) / 2.0;
    }
    out.depth.at(x, y, 0) = camera.to_camera(p).z();
    out.mask.at(x, y, 0) = 1.0;
  });
  return out;
}

std::vector<RenderedView> render_views(const TriangleMesh& mesh,
                                       const std::vector<CameraView>& cameras) {
  std::vector<RenderedView> out;
  out.reserve(cameras.size());
  for (const auto& cam : cameras) out.push_back(render_view(mesh, cam));
  return out;
}

TriangleMesh make_icosphere(double radius_cm, int subdivisions, const Vec3& color) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  const double verts[12][3] = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                               {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                               {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (const auto& v : verts)
    mesh.vertices.push_back(Vec3(v[0], v[1], v[2]).normalized() * radius_cm);
  const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},  {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},  {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},  {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (const auto& f : faces) mesh.triangles.push_back({f[0], f[1], f[2]});
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      mesh.vertices.push_back(
          ((mesh.vertices[a] + mesh.vertices[b]) / 2.0).normalized() * radius_cm);
      const int idx = int(mesh.vertices.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }
  mesh.colors.assign(mesh.vertices.size(), color);
  mesh.validate();
  return mesh;
}

namespace {

double capsule_distance(const Vec3& p, const Vec3& a, const Vec3& b, double r) {
  const Vec3 ab = b - a, ap = p - a;
  const double denom = ab.squaredNorm();
  const double t = denom > 0 ? std::clamp(ap.dot(ab) / denom, 0.0, 1.0) : 0.0;
  return (ap - ab * t).norm() - r;
}

double smooth_min(double a, double b, double k) {
  const double h = std::clamp(0.5 + 0.5 * (b - a) / k, 0.0, 1.0);
  return b + (a - b) * h - k * h * (1.0 - h);
}

}  // namespace

double humanoid_distance(const Vec3& p) {
  // capsule skeleton, y up, feet near y = -86, head top near y = +64
  double d = capsule_distance(p, Vec3(0, -22, 0), Vec3(0, 26, 0), 15);  // torso
  d = smooth_min(d, capsule_distance(p, Vec3(0, 28, 0), Vec3(0, 40, 0), 5.5), 3);   // neck
  d = smooth_min(d, capsule_distance(p, Vec3(0, 52, 0), Vec3(0, 52, 0), 12), 3);    // head
  d = smooth_min(d, capsule_distance(p, Vec3(-9, -26, 0), Vec3(-10, -80, 1), 6), 3);  // legs
  d = smooth_min(d, capsule_distance(p, Vec3(9, -26, 0), Vec3(10, -80, 1), 6), 3);
  d = smooth_min(d, capsule_distance(p, Vec3(-15, 24, 0), Vec3(-24, -24, 3), 5), 3);  // arms
  d = smooth_min(d, capsule_distance(p, Vec3(15, 24, 0), Vec3(24, -24, 3), 5), 3);
  return d;
}

TriangleMesh make_humanoid(double grid_spacing_cm) {
  const double band = 3.0 * grid_spacing_cm;
  VolumeSpec spec;
  spec.origin = Vec3(-40, -96, -26);
  spec.edge = 172;  // covers the figure with margin
  spec.resolution = std::max(8, int(std::ceil(spec.edge / grid_spacing_cm)));
  const int R = spec.resolution;
  std::vector<Vec3i> sites;
  std::vector<double> vals;
  for (int x = 0; x < R; ++x)
    for (int y = 0; y < R; ++y)
      for (int z = 0; z < R; ++z) {
        const double d = humanoid_distance(spec.position(x, y, z));
        // keep the interior active (saturated) so extraction never sees a
        // fabricated crossing against synthesized off-band values
        if (d < band) {
          sites.emplace_back(x, y, z);
          vals.push_back(std::max(d, -band));
        }
      }
  auto active = std::make_shared<ActiveSet>(spec, sites);
  TsdfVolume tsdf{SparseField(active, 1, band), band};
  for (size_t i = 0; i < sites.size(); ++i) {
    const auto& s = sites[i];
    tsdf.field.value(active->rank_of(s), 0) = vals[i];
  }
  TriangleMesh mesh = extract_mesh(tsdf);
  // simple two-tone coloring: skin above the waist, dark below
  mesh.colors.resize(mesh.vertices.size());
  for (size_t i = 0; i < mesh.vertices.size(); ++i)
    mesh.colors[i] = mesh.vertices[i].y() > -22 ? Vec3(0.87, 0.68, 0.55) : Vec3(0.25, 0.3, 0.5);
  mesh.validate();
  return mesh;
}

}  // namespace voxband

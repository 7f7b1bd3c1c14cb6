#include "voxband/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "voxband/bucket_grid.hpp"
#include "voxband/errors.hpp"
#include "voxband/image_io.hpp"
#include "voxband/mesh_io.hpp"
#include "voxband/parallel.hpp"
#include "voxband/texture.hpp"

namespace voxband {

namespace {

constexpr int kGutter = 2;

struct Chart {
  // triangle corners in local 2D chart coordinates (cm)
  Vec2 p0, p1, p2;
  double width_cm = 0, height_cm = 0;
  int w = 0, h = 0;      // interior texels
  int x = 0, y = 0;      // interior origin in the atlas
};

Chart make_chart(const TriangleMesh& mesh, int tri) {
  const auto& t = mesh.triangles[tri];
  const Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
  Vec3 e1 = b - a;
  const double len = e1.norm();
  Chart ch;
  if (len < 1e-12) {
    ch.p0 = ch.p1 = ch.p2 = Vec2(0, 0);
    return ch;
  }
  e1 /= len;
  const Vec3 n = (b - a).cross(c - a);
  Vec3 e2 = n.cross(e1);
  const double l2 = e2.norm();
  e2 = l2 > 1e-12 ? Vec3(e2 / l2) : Vec3(0, 0, 0);
  ch.p0 = Vec2(0, 0);
  ch.p1 = Vec2(len, 0);
  ch.p2 = Vec2((c - a).dot(e1), std::abs((c - a).dot(e2)));
  ch.width_cm = std::max({ch.p0.x(), ch.p1.x(), ch.p2.x()});
  ch.height_cm = ch.p2.y();
  return ch;
}

bool shelf_pack(std::vector<Chart>& charts, double density, int res) {
  for (auto& ch : charts) {
    ch.w = std::max(1, int(std::ceil(ch.width_cm * density)) + 1);
    ch.h = std::max(1, int(std::ceil(ch.height_cm * density)) + 1);
    if (ch.w + 2 * kGutter > res || ch.h + 2 * kGutter > res) return false;
  }
  int x = kGutter, y = kGutter, shelf_h = 0;
  for (auto& ch : charts) {
    if (x + ch.w + kGutter > res) {
      x = kGutter;
      y += shelf_h + 2 * kGutter;
      shelf_h = 0;
    }
    if (y + ch.h + kGutter > res) return false;
    ch.x = x;
    ch.y = y;
    x += ch.w + 2 * kGutter;
    shelf_h = std::max(shelf_h, ch.h);
  }
  return true;
}

// barycentric coordinates of q in the 2D triangle (p0, p1, p2)
bool barycentric_2d(const Chart& ch, const Vec2& q, Vec3& bary) {
  const Vec2 v0 = ch.p1 - ch.p0, v1 = ch.p2 - ch.p0, v2 = q - ch.p0;
  const double den = v0.x() * v1.y() - v1.x() * v0.y();
  if (std::abs(den) < 1e-14) return false;
  const double b1 = (v2.x() * v1.y() - v1.x() * v2.y()) / den;
  const double b2 = (v0.x() * v2.y() - v2.x() * v0.y()) / den;
  bary = Vec3(1.0 - b1 - b2, b1, b2);
  return true;
}

}  // namespace

AtlasResult bake_atlas(const TriangleMesh& mesh, const SparseField& weights,
                       const std::vector<CameraView>& cameras,
                       const std::vector<ImageBuffer>& images, int atlas_resolution) {
  if (mesh.empty()) throw ValidationError("cannot bake an empty mesh");
  if (atlas_resolution < 64) throw ConfigError("atlas resolution too small");
  const int T = int(mesh.triangles.size());
  std::vector<Chart> charts;
  charts.resize(size_t(T));
  double total_area = 0;
  for (int t = 0; t < T; ++t) {
    charts[size_t(t)] = make_chart(mesh, t);
    total_area += (charts[size_t(t)].width_cm + 1e-3) * (charts[size_t(t)].height_cm + 1e-3);
  }
  const double atlas_area = double(atlas_resolution) * atlas_resolution;
  double density = std::sqrt(0.35 * atlas_area / std::max(total_area, 1e-9));
  bool packed = false;
  for (int attempt = 0; attempt < 40 && !packed; ++attempt) {
    packed = shelf_pack(charts, density, atlas_resolution);
    if (!packed) density *= 0.85;
  }
  if (!packed) {
    // estimate the resolution that would fit at the minimum chart size
    int hint = atlas_resolution;
    const double min_area = double(T) * (1 + 2 * kGutter) * (1 + 2 * kGutter) * 2.0;
    while (double(hint) * hint < min_area && hint < 1 << 16) hint *= 2;
    throw ValidationError("charts do not fit a " + std::to_string(atlas_resolution) +
                          " atlas; try resolution >= " + std::to_string(hint * 2));
  }

  AtlasResult out;
  out.texels_per_cm = density;
  out.atlas = ImageBuffer(atlas_resolution, atlas_resolution, 3, 0.0);
  ImageBuffer filled(atlas_resolution, atlas_resolution, 1, 0.0);
  const VolumeSpec& spec = weights.active().spec();

  parallel_for(0, T, [&](std::int64_t t) {
    const Chart& ch = charts[size_t(t)];
    const auto& tri = mesh.triangles[size_t(t)];
    const Vec3 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    for (int ty = 0; ty < ch.h; ++ty)
      for (int tx = 0; tx < ch.w; ++tx) {
        const Vec2 local((tx + 0.5) / density, (ty + 0.5) / density);
        Vec3 bary;
        if (!barycentric_2d(ch, local, bary)) continue;
        // near-edge texels clamp onto the triangle so its border is covered
        if (bary.minCoeff() < -0.3) continue;
        Vec3 bc = bary.cwiseMax(0.0);
        bc /= bc.sum();
        const Vec3 p = bc.x() * a + bc.y() * b + bc.z() * c;
        Vec3 color = kHoleColor;
        if (spec.contains(p)) {
          const auto blended = blend_color(p, weights, cameras, images);
          if (blended) color = *blended;
        }
        for (int k = 0; k < 3; ++k)
          out.atlas.at(ch.x + tx, ch.y + ty, k) = std::clamp(color[k], 0.0, 1.0);
        filled.at(ch.x + tx, ch.y + ty, 0) = 1.0;
      }
  });

  // gutter fill: dilate chart colors outward
  for (int pass = 0; pass < kGutter; ++pass) {
    ImageBuffer next_filled = filled;
    ImageBuffer next_atlas = out.atlas;
    parallel_for(0, std::int64_t(atlas_resolution) * atlas_resolution, [&](std::int64_t px) {
      const int x = int(px % atlas_resolution), y = int(px / atlas_resolution);
      if (filled.at(x, y, 0) > 0) return;
      double acc[3] = {0, 0, 0};
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= atlas_resolution || ny >= atlas_resolution) continue;
          if (filled.at(nx, ny, 0) <= 0) continue;
          for (int k = 0; k < 3; ++k) acc[k] += out.atlas.at(nx, ny, k);
          ++n;
        }
      if (n == 0) return;
      for (int k = 0; k < 3; ++k) next_atlas.at(x, y, k) = acc[k] / n;
      next_filled.at(x, y, 0) = 1.0;
    });
    filled = std::move(next_filled);
    out.atlas = std::move(next_atlas);
  }

  // duplicated-corner mesh with per-corner UVs (v flipped for OBJ)
  out.mesh.vertices.reserve(size_t(T) * 3);
  out.mesh.uvs.reserve(size_t(T) * 3);
  const double inv_res = 1.0 / atlas_resolution;
  for (int t = 0; t < T; ++t) {
    const Chart& ch = charts[size_t(t)];
    const auto& tri = mesh.triangles[size_t(t)];
    const Vec2 corners[3] = {ch.p0, ch.p1, ch.p2};
    const int base = int(out.mesh.vertices.size());
    for (int k = 0; k < 3; ++k) {
      out.mesh.vertices.push_back(mesh.vertices[tri[k]]);
      const double u = (ch.x + corners[k].x() * density) * inv_res;
      const double v = (ch.y + corners[k].y() * density) * inv_res;
      out.mesh.uvs.push_back(Vec2(u, 1.0 - v));
    }
    out.mesh.triangles.push_back({base, base + 1, base + 2});
  }
  return out;
}

ImageBuffer render_atlas_view(const AtlasResult& baked, const CameraView& camera) {
  const BucketGrid grid(baked.mesh);
  const Vec3 eye = camera.center();
  const int W = camera.width, H = camera.height;
  ImageBuffer out(W, H, 3, 0.0);
  const int res = baked.atlas.width;
  parallel_for(0, std::int64_t(W) * H, [&](std::int64_t px) {
    const int x = int(px % W), y = int(px / W);
    const Vec3 dir_cam((x - camera.principal.x()) / camera.focal.x(),
                       (y - camera.principal.y()) / camera.focal.y(), 1.0);
    const Vec3 dir = (camera.rotation.transpose() * dir_cam).normalized();
    const RayHit hit = grid.raycast(eye, dir);
    if (!hit.hit) return;
    const auto& tri = baked.mesh.triangles[size_t(hit.triangle)];
    const Vec2 uv = hit.barycentric.x() * baked.mesh.uvs[tri[0]] +
                    hit.barycentric.y() * baked.mesh.uvs[tri[1]] +
                    hit.barycentric.z() * baked.mesh.uvs[tri[2]];
    const Vec2 pix(std::clamp(uv.x() * res - 0.5, 0.0, double(res - 1)),
                   std::clamp((1.0 - uv.y()) * res - 0.5, 0.0, double(res - 1)));
    const auto rgb = baked.atlas.bilinear(pix);
    for (int c = 0; c < 3; ++c) out.at(x, y, c) = rgb[size_t(c)];
  });
  return out;
}

void save_textured_obj(const std::string& dir, const std::string& stem,
                       const AtlasResult& baked) {
  std::filesystem::create_directories(dir);
  const std::string png = stem + ".png";
  save_png(dir + "/" + png, baked.atlas);
  {
    std::ofstream mtl(dir + "/" + stem + ".mtl");
    if (!mtl) throw IoError("cannot write material file");
    mtl << "newmtl " << stem << "\nKd 1 1 1\nmap_Kd " << png << "\n";
  }
  save_obj(dir + "/" + stem + ".obj", baked.mesh, stem + ".mtl", stem);
}

}  // namespace voxband

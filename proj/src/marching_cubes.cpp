#include "voxband/marching_cubes.hpp"

#include <algorithm>
#include <unordered_map>

#include "voxband/errors.hpp"
#include "voxband/mc_tables.hpp"

namespace voxband {

namespace {

const int corner_offset[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                 {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

}  // namespace

TriangleMesh extract_mesh(const TsdfVolume& tsdf, const TsdfVolume* coarse_fallback) {
  const ActiveSet& active = tsdf.active();
  if (active.empty()) throw NumericError("cannot extract a mesh from an empty TSDF");
  const VolumeSpec& spec = active.spec();
  const int R = spec.resolution;

  // candidate cells: every cell one of whose corners is active, canonical order
  std::vector<std::uint64_t> cells;
  cells.reserve(active.size() * 4);
  for (const auto& s : active.sites())
    for (int k = 0; k < 8; ++k) {
      const int x = s.x() - corner_offset[k][0];
      const int y = s.y() - corner_offset[k][1];
      const int z = s.z() - corner_offset[k][2];
      if (x >= 0 && y >= 0 && z >= 0 && x < R - 1 && y < R - 1 && z < R - 1)
        cells.push_back(pack_index(x, y, z));
    }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  auto corner_value = [&](int x, int y, int z) -> double {
    const std::int64_t rank = active.rank_of(x, y, z);
    if (rank >= 0) return tsdf.value(rank);
    if (coarse_fallback) {
      const Vec3 p = spec.position(x, y, z);
      if (coarse_fallback->active().spec().contains(p)) {
        const double v = coarse_fallback->field.trilinear(p)[0];
        return std::clamp(v, -tsdf.truncation, tsdf.truncation);
      }
    }
    return tsdf.truncation;
  };

  TriangleMesh mesh;
  std::unordered_map<std::uint64_t, int> edge_vertex;  // welded vertex per grid edge
  for (const std::uint64_t cell : cells) {
    const int x = int(cell >> 42), y = int((cell >> 21) & 0x1FFFFF), z = int(cell & 0x1FFFFF);
    double v[8];
    int cube = 0;
    bool informative = false;
    for (int k = 0; k < 8; ++k) {
      v[k] = corner_value(x + corner_offset[k][0], y + corner_offset[k][1],
                          z + corner_offset[k][2]);
      if (v[k] < 0) cube |= 1 << k;
      if (std::abs(v[k]) < tsdf.truncation) informative = true;
    }
    // every corner saturated at +-truncation carries no surface information;
    // skipping these suppresses phantom walls at the inner band boundary
    if (!informative) continue;
    const int* tris = mc::tri_table[cube];
    for (int i = 0; tris[i] >= 0; i += 3) {
      int vid[3];
      for (int k = 0; k < 3; ++k) {
        const int e = tris[i + k];
        const int c0 = mc::edge_corners[e][0], c1 = mc::edge_corners[e][1];
        const int a0[3] = {x + corner_offset[c0][0], y + corner_offset[c0][1],
                           z + corner_offset[c0][2]};
        const int a1[3] = {x + corner_offset[c1][0], y + corner_offset[c1][1],
                           z + corner_offset[c1][2]};
        // grid edge key: lower endpoint sample + axis (2 bits)
        int axis = 0;
        for (int a = 0; a < 3; ++a)
          if (a0[a] != a1[a]) axis = a;
        const bool swap = a0[axis] > a1[axis];
        const int* lo = swap ? a1 : a0;
        const std::uint64_t key = (pack_index(lo[0], lo[1], lo[2]) << 2) | std::uint64_t(axis);
        auto it = edge_vertex.find(key);
        if (it == edge_vertex.end()) {
          const double va = v[c0], vb = v[c1];
          double t = va == vb ? 0.5 : va / (va - vb);
          t = std::clamp(t, 0.0, 1.0);
          const Vec3 pa = spec.position(a0[0], a0[1], a0[2]);
          const Vec3 pb = spec.position(a1[0], a1[1], a1[2]);
          mesh.vertices.push_back(pa + t * (pb - pa));
          it = edge_vertex.emplace(key, int(mesh.vertices.size()) - 1).first;
        }
        vid[k] = it->second;
      }
      // swap to keep normals pointing toward positive values
      if (vid[0] != vid[1] && vid[1] != vid[2] && vid[0] != vid[2])
        mesh.triangles.push_back({vid[0], vid[2], vid[1]});
    }
  }
  if (mesh.empty()) throw NumericError("no zero crossing: extracted mesh is empty");
  return mesh;
}

}  // namespace voxband

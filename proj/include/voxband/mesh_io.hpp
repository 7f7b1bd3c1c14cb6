#pragma once

#include <string>

#include "voxband/mesh.hpp"

namespace voxband {

TriangleMesh load_mesh(const std::string& path);  // dispatches on extension

TriangleMesh load_obj(const std::string& path);
void save_obj(const std::string& path, const TriangleMesh& mesh,
              const std::string& material_lib = "", const std::string& material = "");

// Binary little-endian PLY with optional per-vertex uchar RGB.
TriangleMesh load_ply(const std::string& path);
void save_ply(const std::string& path, const TriangleMesh& mesh);

}  // namespace voxband

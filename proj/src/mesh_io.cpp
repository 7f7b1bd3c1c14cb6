#include "voxband/mesh_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "voxband/errors.hpp"

namespace voxband {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

TriangleMesh load_mesh(const std::string& path) {
  if (ends_with(path, ".obj")) return load_obj(path);
  if (ends_with(path, ".ply")) return load_ply(path);
  throw IoError("unsupported mesh format: " + path);
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh: " + path);
  TriangleMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      double x, y, z;
      ss >> x >> y >> z;
      mesh.vertices.emplace_back(x, y, z);
      double r, g, b;
      if (ss >> r >> g >> b) mesh.colors.emplace_back(r, g, b);
    } else if (tag == "vn") {
      double x, y, z;
      ss >> x >> y >> z;
      mesh.normals.emplace_back(x, y, z);
    } else if (tag == "vt") {
      double u, v;
      ss >> u >> v;
      mesh.uvs.emplace_back(u, v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        // v, v/vt, v/vt/vn, v//vn all start with the vertex index
        idx.push_back(std::stoi(tok.substr(0, tok.find('/'))) - 1);
      }
      for (size_t k = 2; k < idx.size(); ++k)
        mesh.triangles.push_back({idx[0], int(idx[k - 1]), int(idx[k])});
    }
  }
  if (!mesh.colors.empty() && mesh.colors.size() != mesh.vertices.size())
    mesh.colors.clear();
  if (!mesh.normals.empty() && mesh.normals.size() != mesh.vertices.size())
    mesh.normals.clear();
  if (!mesh.uvs.empty() && mesh.uvs.size() != mesh.vertices.size())
    mesh.uvs.clear();
  mesh.validate();
  return mesh;
}

void save_obj(const std::string& path, const TriangleMesh& mesh,
              const std::string& material_lib, const std::string& material) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh: " + path);
  out.precision(9);
  if (!material_lib.empty()) out << "mtllib " << material_lib << "\n";
  const bool with_color = mesh.colors.size() == mesh.vertices.size();
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    out << "v " << v.x() << " " << v.y() << " " << v.z();
    if (with_color)
      out << " " << mesh.colors[i].x() << " " << mesh.colors[i].y() << " " << mesh.colors[i].z();
    out << "\n";
  }
  for (const auto& n : mesh.normals)
    out << "vn " << n.x() << " " << n.y() << " " << n.z() << "\n";
  for (const auto& t : mesh.uvs) out << "vt " << t.x() << " " << t.y() << "\n";
  if (!material.empty()) out << "usemtl " << material << "\n";
  const bool with_uv = mesh.uvs.size() == mesh.vertices.size();
  const bool with_n = mesh.normals.size() == mesh.vertices.size();
  for (const auto& t : mesh.triangles) {
    out << "f";
    for (int k = 0; k < 3; ++k) {
      const int i = t[k] + 1;
      out << " " << i;
      if (with_uv && with_n)
        out << "/" << i << "/" << i;
      else if (with_uv)
        out << "/" << i;
      else if (with_n)
        out << "//" << i;
    }
    out << "\n";
  }
}

namespace {

template <typename T>
T read_le(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

TriangleMesh load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mesh: " + path);
  std::string line;
  std::getline(in, line);
  if (line != "ply") throw IoError("not a PLY file: " + path);
  size_t n_verts = 0, n_faces = 0;
  bool has_color = false, has_normal = false;
  bool in_vertex = false;
  std::vector<std::string> vertex_props;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "binary_little_endian")
        throw IoError("only binary little-endian PLY is supported");
    } else if (tag == "element") {
      std::string name;
      size_t count;
      ss >> name >> count;
      in_vertex = name == "vertex";
      if (in_vertex)
        n_verts = count;
      else if (name == "face")
        n_faces = count;
    } else if (tag == "property" && in_vertex) {
      std::string type, name;
      ss >> type >> name;
      vertex_props.push_back(name);
      if (name == "red") has_color = true;
      if (name == "nx") has_normal = true;
    } else if (tag == "end_header") {
      break;
    }
  }
  TriangleMesh mesh;
  mesh.vertices.resize(n_verts);
  if (has_color) mesh.colors.resize(n_verts);
  if (has_normal) mesh.normals.resize(n_verts);
  for (size_t i = 0; i < n_verts; ++i) {
    for (const auto& prop : vertex_props) {
      if (prop == "x") mesh.vertices[i].x() = read_le<float>(in);
      else if (prop == "y") mesh.vertices[i].y() = read_le<float>(in);
      else if (prop == "z") mesh.vertices[i].z() = read_le<float>(in);
      else if (prop == "nx") mesh.normals[i].x() = read_le<float>(in);
      else if (prop == "ny") mesh.normals[i].y() = read_le<float>(in);
      else if (prop == "nz") mesh.normals[i].z() = read_le<float>(in);
      else if (prop == "red") mesh.colors[i].x() = read_le<std::uint8_t>(in) / 255.0;
      else if (prop == "green") mesh.colors[i].y() = read_le<std::uint8_t>(in) / 255.0;
      else if (prop == "blue") mesh.colors[i].z() = read_le<std::uint8_t>(in) / 255.0;
      else throw IoError("unsupported PLY vertex property: " + prop);
    }
  }
  mesh.triangles.reserve(n_faces);
  for (size_t i = 0; i < n_faces; ++i) {
    const int n = read_le<std::uint8_t>(in);
    std::vector<int> idx(n);
    for (int k = 0; k < n; ++k) idx[k] = int(read_le<std::uint32_t>(in));
    for (int k = 2; k < n; ++k) mesh.triangles.push_back({idx[0], idx[k - 1], idx[k]});
  }
  if (!in) throw IoError("truncated PLY file: " + path);
  mesh.validate();
  return mesh;
}

void save_ply(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write mesh: " + path);
  const bool with_color = mesh.colors.size() == mesh.vertices.size();
  const bool with_normal = mesh.normals.size() == mesh.vertices.size();
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  if (with_normal) out << "property float nx\nproperty float ny\nproperty float nz\n";
  if (with_color)
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "element face " << mesh.triangles.size() << "\n";
  out << "property list uchar uint vertex_indices\nend_header\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    for (int k = 0; k < 3; ++k) write_le<float>(out, float(mesh.vertices[i][k]));
    if (with_normal)
      for (int k = 0; k < 3; ++k) write_le<float>(out, float(mesh.normals[i][k]));
    if (with_color)
      for (int k = 0; k < 3; ++k)
        write_le<std::uint8_t>(
            out, std::uint8_t(std::lround(std::clamp(mesh.colors[i][k], 0.0, 1.0) * 255.0)));
  }
  for (const auto& t : mesh.triangles) {
    write_le<std::uint8_t>(out, 3);
    for (int k = 0; k < 3; ++k) write_le<std::uint32_t>(out, std::uint32_t(t[k]));
  }
}

}  // namespace voxband

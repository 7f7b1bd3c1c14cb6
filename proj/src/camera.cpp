#include "voxband/camera.hpp"

#include <fstream>

#include <json.hpp>

#include "voxband/errors.hpp"

namespace voxband {

void CameraView::validate() const {
  if (width <= 0 || height <= 0) throw ValidationError("camera image size must be positive");
  const Mat3 err = rotation.transpose() * rotation - Mat3::Identity();
  if (err.cwiseAbs().maxCoeff() > 1e-6)
    throw ValidationError("camera rotation is not orthonormal");
}

Projection CameraView::project(const Vec3& world) const {
  const Vec3 pc = to_camera(world);
  Projection out;
  out.depth = pc.z();
  if (pc.z() <= 0) return out;
  out.pixel = focal.cwiseProduct(Vec2(pc.x() / pc.z(), pc.y() / pc.z())) + principal;
  out.valid = out.pixel.x() >= 0 && out.pixel.x() <= width - 1 &&
              out.pixel.y() >= 0 && out.pixel.y() <= height - 1;
  return out;
}

Vec3 CameraView::unproject(const Vec2& pixel, double depth) const {
  const Vec2 n = (pixel - principal).cwiseQuotient(focal);
  const Vec3 pc(n.x() * depth, n.y() * depth, depth);
  return rotation.transpose() * (pc - translation);
}

std::vector<CameraView> load_cameras_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open camera file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw IoError("malformed camera json: " + std::string(e.what()));
  }
  if (!doc.contains("views") || !doc["views"].is_array())
    throw ValidationError("camera json missing 'views' array");
  std::vector<CameraView> cams;
  for (const auto& v : doc["views"]) {
    CameraView c;
    c.focal = Vec2(v.at("focal")[0], v.at("focal")[1]);
    c.principal = Vec2(v.at("principal")[0], v.at("principal")[1]);
    const auto& r = v.at("rotation");
    if (r.size() != 9) throw ValidationError("rotation must have 9 row-major entries");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c.rotation(i, j) = r[3 * i + j];
    const auto& t = v.at("translation");
    c.translation = Vec3(t[0], t[1], t[2]);
    c.width = v.at("width");
    c.height = v.at("height");
    c.validate();
    cams.push_back(c);
  }
  return cams;
}

void save_cameras_json(const std::string& path, const std::vector<CameraView>& cams) {
  nlohmann::json views = nlohmann::json::array();
  for (const auto& c : cams) {
    nlohmann::json v;
    v["focal"] = {c.focal.x(), c.focal.y()};
    v["principal"] = {c.principal.x(), c.principal.y()};
    std::vector<double> r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.push_back(c.rotation(i, j));
    v["rotation"] = r;
    v["translation"] = {c.translation.x(), c.translation.y(), c.translation.z()};
    v["width"] = c.width;
    v["height"] = c.height;
    views.push_back(v);
  }
  nlohmann::json doc;
  doc["views"] = views;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write camera file: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace voxband

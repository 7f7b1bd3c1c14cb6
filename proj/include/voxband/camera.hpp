#pragma once

#include <vector>

#include "voxband/geometry.hpp"

namespace voxband {

struct Projection {
  Vec2 pixel = Vec2::Zero();
  double depth = 0.0;  // camera-space z, cm
  bool valid = false;
};

// Calibrated perspective view. rotation maps world to camera, translation in cm.
struct CameraView {
  Vec2 focal = Vec2(1, 1);           // pixels
  Vec2 principal = Vec2(0, 0);       // pixels
  Mat3 rotation = Mat3::Identity();  // world -> camera
  Vec3 translation = Vec3::Zero();   // cm
  int width = 1;
  int height = 1;

  void validate() const;  // throws ValidationError when RtR deviates from I by > 1e-6

  Vec3 to_camera(const Vec3& world) const { return rotation * world + translation; }
  Vec3 center() const { return -rotation.transpose() * translation; }

  // valid iff depth > 0 and the pixel lands inside [0,w-1]x[0,h-1].
  Projection project(const Vec3& world) const;

  Vec3 unproject(const Vec2& pixel, double depth) const;
};

std::vector<CameraView> load_cameras_json(const std::string& path);
void save_cameras_json(const std::string& path, const std::vector<CameraView>& cams);

}  // namespace voxband

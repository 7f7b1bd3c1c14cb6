#pragma once

#include <string>
#include <vector>

#include "voxband/camera.hpp"
#include "voxband/image.hpp"
#include "voxband/mesh.hpp"

namespace voxband {

struct MeshDistanceReport {
  double p2s_precision = 0;     // pred vertex -> gt surface, cm
  double p2s_recall = 0;        // gt vertex -> pred surface, cm
  double chamfer_precision = 0; // pred vertex -> nearest gt vertex, cm
  double chamfer_recall = 0;    // gt vertex -> nearest pred vertex, cm
};

struct DistanceOptions {
  bool normalize_height_to_1m = false;  // uniform scale so bbox height = 100 cm
  bool area_weighted_samples = false;   // sample surfaces instead of vertices
  int sample_count = 10000;
  std::uint64_t seed = 42;
};

MeshDistanceReport p2s_chamfer(const TriangleMesh& pred, const TriangleMesh& gt,
                               const DistanceOptions& options = {});

// Mean angular gap (degrees) between re-rendered camera-space normal maps,
// over pixels both meshes cover.
double normal_error(const TriangleMesh& pred, const TriangleMesh& gt,
                    const std::vector<CameraView>& cameras);

// 10*log10(1/MSE) on [0,1] images; identical images report 99 dB.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

// Mean SSIM over an 11x11 Gaussian window (sigma 1.5) on luminance.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

std::string report_json(const MeshDistanceReport& report);
std::string report_csv(const MeshDistanceReport& report);

}  // namespace voxband

#pragma once

#include <string>
#include <vector>

#include "voxband/carve.hpp"
#include "voxband/network.hpp"

namespace voxband {

struct PipelineConfig {
  int coarse_resolution = 256;          // fine = 2x
  double cube_edge_cm = 256.0;
  Vec3 cube_origin_cm = Vec3(-128, -128, -128);
  double truncation_cm = 5.0;
  double bias_c_cm = 5.0;
  double bias_f_cm = 3.0;
  double band_cm = 3.0;
  double texture_band_cm = 1.0;
  int coarse_feature_channels = 128;    // image-feature width fed to the coarse net
  int fine_feature_channels = 128;      // normal-feature width fed to the fine net
  int export_channels = 32;
  std::vector<int> coarse_plan = {64, 96, 128};
  int fine_width = 64;
  std::string coarse_checkpoint;
  std::string fine_checkpoint;
  std::string texture_checkpoint;

  int fine_resolution() const { return 2 * coarse_resolution; }
  VolumeSpec coarse_spec() const {
    return VolumeSpec{cube_origin_cm, cube_edge_cm, coarse_resolution};
  }
  VolumeSpec fine_spec() const {
    return VolumeSpec{cube_origin_cm, cube_edge_cm, fine_resolution()};
  }
  void validate() const;  // band <= bias_f <= truncation, positive sizes
};

PipelineConfig load_pipeline_config(const std::string& path);

// Coarse and fine networks with their decode heads; either loaded from
// checkpoints or freshly seeded at the config dimensions.
struct ReconstructionModels {
  NetworkGraph coarse_net;
  DecodeHead coarse_head;
  NetworkGraph fine_net;
  DecodeHead fine_head;
};

ReconstructionModels make_models(const PipelineConfig& config, std::uint64_t seed);
ReconstructionModels load_models(const PipelineConfig& config);

struct StageTimings {
  double carve_s = 0, features_s = 0, coarse_net_s = 0;
  double band_s = 0, fine_net_s = 0, mesh_s = 0;
};

struct CoarseStageResult {
  TsdfVolume d0;
  SparseField coarse_export;
  ActiveSetPtr hull;
  StageTimings timings;
};

CoarseStageResult coarse_stage(const std::vector<ImageBuffer>& images,
                               const std::vector<ImageBuffer>& masks,
                               const std::vector<CameraView>& cameras,
                               const PipelineConfig& config, const NetworkGraph& coarse_net,
                               const DecodeHead& coarse_head);

struct FineStageResult {
  TsdfVolume d_final;      // on the fine band
  ActiveSetPtr band;
  bool band_empty_fallback = false;
  StageTimings timings;
};

FineStageResult fine_stage(const TsdfVolume& d0, const SparseField& coarse_export,
                           const std::vector<ImageBuffer>& normal_maps,
                           const std::vector<CameraView>& cameras,
                           const PipelineConfig& config, const NetworkGraph& fine_net,
                           const DecodeHead& fine_head);

// Trilinear upsample of a coarse TSDF onto the fine sites within band_cm of
// its zero set (all covered fine sites when band_cm >= truncation).
std::pair<ActiveSetPtr, TsdfVolume> upsample_tsdf_band(const TsdfVolume& d0, double band_cm);

struct ReconstructionResult {
  TriangleMesh mesh;
  TsdfVolume d0;
  FineStageResult fine;
  ActiveSetPtr hull;
  std::string report_json;  // stage timings + occupancy
};

ReconstructionResult reconstruct(const std::vector<ImageBuffer>& images,
                                 const std::vector<ImageBuffer>& masks,
                                 const std::vector<ImageBuffer>& normal_maps,
                                 const std::vector<CameraView>& cameras,
                                 const PipelineConfig& config,
                                 const ReconstructionModels& models);

}  // namespace voxband

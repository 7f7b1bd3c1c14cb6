#include "voxband/pipeline.hpp"

#include <chrono>
#include <fstream>

#include <nlohmann/json.hpp>

#include "voxband/errors.hpp"
#include "voxband/features.hpp"
#include "voxband/marching_cubes.hpp"
#include "voxband/parallel.hpp"

namespace voxband {

using json = nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void PipelineConfig::validate() const {
  if (coarse_resolution < 8) throw ConfigError("coarse resolution too small");
  if (cube_edge_cm <= 0) throw ConfigError("cube edge must be positive");
  if (!(band_cm <= bias_f_cm && bias_f_cm <= truncation_cm))
    throw ConfigError("expected band <= fine bias <= truncation");
  if (texture_band_cm <= 0 || texture_band_cm > band_cm)
    throw ConfigError("texture band must sit inside the fine band");
  if (coarse_feature_channels < 9 || fine_feature_channels < 9)
    throw ConfigError("feature widths must be at least 9");
  if (coarse_plan.size() != 3) throw ConfigError("coarse plan needs three levels");
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
  PipelineConfig cfg;
  try {
    if (doc.contains("coarse_resolution")) cfg.coarse_resolution = doc["coarse_resolution"];
    if (doc.contains("cube_edge_cm")) cfg.cube_edge_cm = doc["cube_edge_cm"];
    if (doc.contains("cube_origin_cm")) {
      const auto& o = doc["cube_origin_cm"];
      cfg.cube_origin_cm = Vec3(o.at(0), o.at(1), o.at(2));
    }
    if (doc.contains("truncation_cm")) cfg.truncation_cm = doc["truncation_cm"];
    if (doc.contains("bias_c_cm")) cfg.bias_c_cm = doc["bias_c_cm"];
    if (doc.contains("bias_f_cm")) cfg.bias_f_cm = doc["bias_f_cm"];
    if (doc.contains("band_cm")) cfg.band_cm = doc["band_cm"];
    if (doc.contains("texture_band_cm")) cfg.texture_band_cm = doc["texture_band_cm"];
    if (doc.contains("coarse_feature_channels"))
      cfg.coarse_feature_channels = doc["coarse_feature_channels"];
    if (doc.contains("fine_feature_channels"))
      cfg.fine_feature_channels = doc["fine_feature_channels"];
    if (doc.contains("export_channels")) cfg.export_channels = doc["export_channels"];
    if (doc.contains("coarse_plan")) cfg.coarse_plan = doc["coarse_plan"].get<std::vector<int>>();
    if (doc.contains("fine_width")) cfg.fine_width = doc["fine_width"];
    if (doc.contains("coarse_checkpoint")) cfg.coarse_checkpoint = doc["coarse_checkpoint"];
    if (doc.contains("fine_checkpoint")) cfg.fine_checkpoint = doc["fine_checkpoint"];
    if (doc.contains("texture_checkpoint")) cfg.texture_checkpoint = doc["texture_checkpoint"];
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field type mismatch: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ReconstructionModels make_models(const PipelineConfig& config, std::uint64_t seed) {
  ReconstructionModels m;
  m.coarse_net = make_coarse_unet(config.coarse_feature_channels, config.coarse_plan,
                                  config.export_channels);
  m.coarse_head.weights.assign(size_t(config.coarse_plan[0]), 0.0);
  init_network(m.coarse_net, m.coarse_head, seed);
  m.fine_net = make_fine_net(config.fine_feature_channels + config.export_channels,
                             config.export_channels, config.fine_width);
  m.fine_head.weights.assign(size_t(config.fine_width), 0.0);
  init_network(m.fine_net, m.fine_head, seed + 1);
  return m;
}

ReconstructionModels load_models(const PipelineConfig& config) {
  if (config.coarse_checkpoint.empty() || config.fine_checkpoint.empty())
    throw ConfigError("both coarse and fine checkpoints are required");
  ReconstructionModels m;
  load_checkpoint(config.coarse_checkpoint, m.coarse_net, m.coarse_head);
  load_checkpoint(config.fine_checkpoint, m.fine_net, m.fine_head);
  if (m.coarse_net.input_channels() != config.coarse_feature_channels)
    throw ConfigError("coarse checkpoint width disagrees with the config");
  if (m.fine_net.input_channels() !=
      config.fine_feature_channels + config.export_channels)
    throw ConfigError("fine checkpoint width disagrees with the config");
  return m;
}

CoarseStageResult coarse_stage(const std::vector<ImageBuffer>& images,
                               const std::vector<ImageBuffer>& masks,
                               const std::vector<CameraView>& cameras,
                               const PipelineConfig& config, const NetworkGraph& coarse_net,
                               const DecodeHead& coarse_head) {
  config.validate();
  if (images.size() != cameras.size() || masks.size() != cameras.size())
    throw ConfigError("view counts disagree");
  CoarseStageResult res;

  auto t0 = std::chrono::steady_clock::now();
  res.hull = std::make_shared<ActiveSet>(
      carve_visual_hull(config.coarse_spec(), cameras, masks,
                        cameras.size() == 1 ? std::optional<DepthBand>(DepthBand{})
                                            : std::nullopt));
  res.timings.carve_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::vector<FeatureMap> maps;
  maps.reserve(images.size());
  for (const auto& img : images)
    maps.push_back(handcrafted_features(img, config.coarse_feature_channels));
  const FeatureVolumeResult fv = build_feature_volume(res.hull, cameras, maps);
  res.timings.features_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const ForwardResult fwd = network_forward(coarse_net, fv.field);
  res.d0 = decode_tsdf(fwd.output, coarse_head, config.bias_c_cm, config.truncation_cm);
  res.coarse_export = fwd.export_field;
  res.timings.coarse_net_s = seconds_since(t0);
  return res;
}

std::pair<ActiveSetPtr, TsdfVolume> upsample_tsdf_band(const TsdfVolume& d0, double band_cm) {
  const ActiveSet& coarse = d0.active();
  const VolumeSpec& cs = coarse.spec();
  VolumeSpec fs = cs;
  fs.resolution = cs.resolution * 2;

  std::vector<Vec3i> candidates;
  for (const auto& s : coarse.sites())
    for (int dx = -1; dx <= 2; ++dx)
      for (int dy = -1; dy <= 2; ++dy)
        for (int dz = -1; dz <= 2; ++dz) {
          const Vec3i f(2 * s.x() + dx, 2 * s.y() + dy, 2 * s.z() + dz);
          if (f.minCoeff() >= 0 && f.maxCoeff() < fs.resolution) candidates.push_back(f);
        }
  ActiveSet cand_set(fs, std::move(candidates));

  std::vector<double> vals(size_t(cand_set.size()));
  parallel_for(0, cand_set.size(), [&](std::int64_t i) {
    vals[size_t(i)] = d0.field.trilinear(fs.position(cand_set.site(i)))[0];
  });
  std::vector<Vec3i> band_sites;
  std::vector<double> band_vals;
  for (std::int64_t i = 0; i < cand_set.size(); ++i)
    if (std::abs(vals[size_t(i)]) < band_cm) {
      band_sites.push_back(cand_set.site(i));
      band_vals.push_back(vals[size_t(i)]);
    }
  auto band = std::make_shared<ActiveSet>(fs, band_sites);
  TsdfVolume up{SparseField(band, 1, d0.truncation), d0.truncation};
  for (size_t i = 0; i < band_sites.size(); ++i)
    up.field.value(band->rank_of(band_sites[i]), 0) = band_vals[i];
  return {band, std::move(up)};
}

FineStageResult fine_stage(const TsdfVolume& d0, const SparseField& coarse_export,
                           const std::vector<ImageBuffer>& normal_maps,
                           const std::vector<CameraView>& cameras,
                           const PipelineConfig& config, const NetworkGraph& fine_net,
                           const DecodeHead& fine_head) {
  config.validate();
  if (normal_maps.size() != cameras.size()) throw ConfigError("view counts disagree");
  FineStageResult res;

  auto t0 = std::chrono::steady_clock::now();
  auto [band, d0_up] = upsample_tsdf_band(d0, config.band_cm);
  if (band->empty()) {
    // untrained or degenerate coarse stage: hand the upsampled coarse TSDF on
    std::tie(band, d0_up) = upsample_tsdf_band(d0, d0.truncation + 1.0);
    res.band_empty_fallback = true;
  }
  res.band = band;
  res.timings.band_s = seconds_since(t0);
  if (res.band_empty_fallback || band->empty()) {
    res.d_final = std::move(d0_up);
    return res;
  }

  t0 = std::chrono::steady_clock::now();
  std::vector<FeatureMap> maps;
  maps.reserve(normal_maps.size());
  for (const auto& img : normal_maps)
    maps.push_back(handcrafted_features(img, config.fine_feature_channels));
  const FeatureVolumeResult fv = build_feature_volume(band, cameras, maps);
  res.timings.features_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const SparseField export_up = upsample_to(coarse_export, band);
  const SparseField input = SparseField::concat(fv.field, export_up);
  const ForwardResult fwd = network_forward(fine_net, input, &export_up);
  res.d_final = decode_tsdf(fwd.output, fine_head, config.bias_f_cm, config.truncation_cm);
  res.timings.fine_net_s = seconds_since(t0);
  return res;
}

ReconstructionResult reconstruct(const std::vector<ImageBuffer>& images,
                                 const std::vector<ImageBuffer>& masks,
                                 const std::vector<ImageBuffer>& normal_maps,
                                 const std::vector<CameraView>& cameras,
                                 const PipelineConfig& config,
                                 const ReconstructionModels& models) {
  ReconstructionResult res;
  CoarseStageResult coarse =
      coarse_stage(images, masks, cameras, config, models.coarse_net, models.coarse_head);
  res.d0 = std::move(coarse.d0);
  res.hull = coarse.hull;
  res.fine = fine_stage(res.d0, coarse.coarse_export, normal_maps, cameras, config,
                        models.fine_net, models.fine_head);

  auto t0 = std::chrono::steady_clock::now();
  res.mesh = extract_mesh(res.fine.d_final, &res.d0);
  const double mesh_s = seconds_since(t0);

  const double coarse_total = double(config.coarse_resolution) * config.coarse_resolution *
                              config.coarse_resolution;
  const double fine_total =
      double(config.fine_resolution()) * config.fine_resolution() * config.fine_resolution();
  json report{
      {"timings_s",
       {{"visual_hull", coarse.timings.carve_s},
        {"coarse_features", coarse.timings.features_s},
        {"coarse_net", coarse.timings.coarse_net_s},
        {"narrow_band", res.fine.timings.band_s},
        {"fine_features", res.fine.timings.features_s},
        {"fine_net", res.fine.timings.fine_net_s},
        {"marching_cubes", mesh_s}}},
      {"occupancy",
       {{"hull_sites", res.hull->size()},
        {"hull_fraction", double(res.hull->size()) / coarse_total},
        {"band_sites", res.fine.band->size()},
        {"band_fraction", double(res.fine.band->size()) / fine_total}}},
      {"band_empty_fallback", res.fine.band_empty_fallback},
      {"vertices", res.mesh.vertices.size()},
      {"triangles", res.mesh.triangles.size()}};
  res.report_json = report.dump(2) + "\n";
  return res;
}

}  // namespace voxband

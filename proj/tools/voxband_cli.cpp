#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "voxband/atlas.hpp"
#include "voxband/errors.hpp"
#include "voxband/features.hpp"
#include "voxband/image_io.hpp"
#include "voxband/marching_cubes.hpp"
#include "voxband/mesh_io.hpp"
#include "voxband/metrics.hpp"
#include "voxband/parallel.hpp"
#include "voxband/pipeline.hpp"
#include "voxband/synth.hpp"
#include "voxband/texture.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace voxband;

namespace {

std::string view_tag(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%03d", v);
  return buf;
}

TriangleMesh resolve_mesh(const std::string& spec_str) {
  if (spec_str == "humanoid") return make_humanoid();
  if (spec_str == "sphere") return make_icosphere(50.0, 4);
  return load_mesh(spec_str);
}

struct Capture {
  std::vector<CameraView> cameras;
  std::vector<ImageBuffer> colors, masks, normals, depths;
};

Capture load_capture(const std::string& dir, bool need_normals = false,
                     bool need_depths = false) {
  Capture cap;
  cap.cameras = load_cameras_json(dir + "/cameras.json");
  for (size_t v = 0; v < cap.cameras.size(); ++v) {
    const std::string tag = view_tag(int(v));
    cap.colors.push_back(load_png(dir + "/color_" + tag + ".png"));
    cap.masks.push_back(load_png(dir + "/mask_" + tag + ".png"));
    if (need_normals) cap.normals.push_back(load_png(dir + "/normal_" + tag + ".png"));
    if (need_depths) cap.depths.push_back(load_pfm(dir + "/depth_" + tag + ".pfm"));
  }
  return cap;
}

PipelineConfig toy_config() {
  PipelineConfig cfg;
  cfg.coarse_resolution = 64;
  cfg.coarse_feature_channels = 12;
  cfg.fine_feature_channels = 12;
  cfg.export_channels = 8;
  cfg.coarse_plan = {8, 12, 16};
  cfg.fine_width = 16;
  return cfg;
}

PipelineConfig config_or_toy(const std::string& path) {
  return path.empty() ? toy_config() : load_pipeline_config(path);
}

void write_text(const std::string& path, const std::string& text) {
  if (!path.empty() && path.find('/') != std::string::npos)
    fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out << text;
}

void save_mesh_file(const std::string& path, const TriangleMesh& mesh) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".obj")
    save_obj(path, mesh);
  else
    save_ply(path, mesh);
}

int run(int argc, char** argv) {
  CLI::App app{"sparse coarse-to-fine TSDF reconstruction toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 42;
  int threads = 0;
  app.add_option("--config", config_path, "pipeline config JSON")->capture_default_str();
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--threads", threads, "worker thread cap");

  // synth-render
  auto* sr = app.add_subcommand("synth-render", "camera ring renders of a mesh");
  std::string sr_mesh, sr_out;
  int sr_views = 6;
  double sr_radius = 250, sr_height = 0;
  sr->add_option("--mesh", sr_mesh, "mesh path, or 'humanoid'/'sphere'")->required();
  sr->add_option("--views", sr_views, "view count")->capture_default_str();
  sr->add_option("--radius", sr_radius, "ring radius, cm")->capture_default_str();
  sr->add_option("--height", sr_height, "ring height, cm")->capture_default_str();
  sr->add_option("--out", sr_out, "capture directory")->required();

  // make-mesh
  auto* mm = app.add_subcommand("make-mesh", "write a bundled synthetic mesh");
  std::string mm_shape = "humanoid", mm_out;
  mm->add_option("--shape", mm_shape, "humanoid | sphere")->capture_default_str();
  mm->add_option("--out", mm_out, "output mesh path (.ply/.obj)")->required();

  // gt-tsdf
  auto* gt = app.add_subcommand("gt-tsdf", "ground-truth TSDF of a mesh");
  std::string gt_mesh, gt_out;
  int gt_res = 64;
  gt->add_option("--mesh", gt_mesh)->required();
  gt->add_option("--resolution", gt_res)->capture_default_str();
  gt->add_option("--out", gt_out, "SVF output path")->required();

  // quantize-study
  auto* qs = app.add_subcommand("quantize-study", "TSDF quantization error vs resolution");
  std::string qs_mesh, qs_res = "32,64,128,256,512", qs_out;
  int qs_samples = 2000;
  qs->add_option("--mesh", qs_mesh)->required();
  qs->add_option("--resolutions", qs_res)->capture_default_str();
  qs->add_option("--samples", qs_samples)->capture_default_str();
  qs->add_option("--out", qs_out, "CSV output path")->required();

  // reconstruct
  auto* rc = app.add_subcommand("reconstruct", "two-stage reconstruction of a capture");
  std::string rc_capture, rc_ckpt, rc_out, rc_report;
  rc->add_option("--capture", rc_capture)->required();
  rc->add_option("--checkpoint", rc_ckpt,
                 "checkpoint prefix (PREFIX.coarse + PREFIX.fine); fresh seeded nets otherwise");
  rc->add_option("--out", rc_out, "mesh output (.ply/.obj)")->required();
  rc->add_option("--report", rc_report, "stage report JSON");

  // texture
  auto* tx = app.add_subcommand("texture", "blend weights + baked atlas for a mesh");
  std::string tx_capture, tx_mesh, tx_ckpt, tx_out;
  int tx_atlas = 1024;
  tx->add_option("--capture", tx_capture)->required();
  tx->add_option("--mesh", tx_mesh)->required();
  tx->add_option("--checkpoint", tx_ckpt, "texture model file; fresh seeded otherwise");
  tx->add_option("--atlas-res", tx_atlas)->capture_default_str();
  tx->add_option("--out", tx_out, "output directory")->required();

  // train-toy
  auto* tt = app.add_subcommand("train-toy", "desk-scale single-example training");
  std::string tt_stage, tt_capture, tt_gt, tt_out;
  int tt_epochs = 500;
  tt->add_option("--stage", tt_stage, "coarse | fine | texture")->required();
  tt->add_option("--capture", tt_capture)->required();
  tt->add_option("--gt", tt_gt, "ground-truth mesh")->required();
  tt->add_option("--epochs", tt_epochs, "Adam steps")->capture_default_str();
  tt->add_option("--out", tt_out, "checkpoint output")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "mesh distance / normal metrics");
  std::string ev_pred, ev_gt, ev_views, ev_out;
  bool ev_norm_height = false;
  ev->add_option("--pred", ev_pred)->required();
  ev->add_option("--gt", ev_gt)->required();
  ev->add_option("--views", ev_views, "capture dir for the normal-map metric");
  ev->add_option("--out", ev_out, "metrics JSON")->required();
  ev->add_flag("--normalize-height", ev_norm_height, "scale both meshes to 1 m height");

  // global flags remain usable after the subcommand name
  for (auto* sub : {sr, mm, gt, qs, rc, tx, tt, ev}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) thread_count() = threads;

  if (*mm) {
    save_mesh_file(mm_out, resolve_mesh(mm_shape));
    std::cout << "{\"mesh\": \"" << mm_out << "\"}\n";
    return 0;
  }

  if (*sr) {
    const TriangleMesh mesh = resolve_mesh(sr_mesh);
    const Vec3 center = (mesh.bbox_min() + mesh.bbox_max()) / 2.0;
    const auto cams = camera_ring(sr_views, sr_radius, sr_height, center);
    fs::create_directories(sr_out);
    save_cameras_json(sr_out + "/cameras.json", cams);
    for (int v = 0; v < sr_views; ++v) {
      const RenderedView rv = render_view(mesh, cams[size_t(v)]);
      const std::string tag = view_tag(v);
      save_png(sr_out + "/color_" + tag + ".png", rv.color);
      save_png(sr_out + "/mask_" + tag + ".png", rv.mask);
      save_png(sr_out + "/normal_" + tag + ".png", rv.normal);
      save_pfm(sr_out + "/depth_" + tag + ".pfm", rv.depth);
    }
    std::cout << "{\"views\": " << sr_views << ", \"dir\": \"" << sr_out << "\"}\n";
    return 0;
  }

  if (*gt) {
    const TriangleMesh mesh = resolve_mesh(gt_mesh);
    const PipelineConfig cfg = config_or_toy(config_path);
    VolumeSpec spec = cfg.coarse_spec();
    spec.resolution = gt_res;
    auto band = std::make_shared<ActiveSet>(
        mesh_band_active_set(mesh, spec, cfg.truncation_cm + spec.spacing()));
    const TsdfVolume tsdf = mesh_to_tsdf(mesh, band, cfg.truncation_cm);
    save_svf(gt_out, tsdf.field);
    std::cout << "{\"sites\": " << band->size() << ", \"out\": \"" << gt_out << "\"}\n";
    return 0;
  }

  if (*qs) {
    const TriangleMesh mesh = resolve_mesh(qs_mesh);
    const PipelineConfig cfg = config_or_toy(config_path);
    std::vector<int> resolutions;
    std::stringstream ss(qs_res);
    for (std::string item; std::getline(ss, item, ',');) resolutions.push_back(std::stoi(item));
    if (resolutions.empty()) throw ConfigError("no resolutions given");
    std::ostringstream csv;
    csv << "resolution,mean_abs_error_cm,samples\n";
    for (int R : resolutions) {
      VolumeSpec spec = cfg.coarse_spec();
      spec.resolution = R;
      auto band = std::make_shared<ActiveSet>(
          mesh_band_active_set(mesh, spec, 2.0 * spec.spacing()));
      const TsdfVolume tsdf = mesh_to_tsdf(mesh, band, cfg.truncation_cm);
      const QuantizationResult q = quantization_error(mesh, tsdf, qs_samples, seed);
      csv.precision(9);
      csv << R << "," << q.mean_abs_error_cm << "," << q.effective_samples << "\n";
    }
    write_text(qs_out, csv.str());
    std::cout << "{\"rows\": " << resolutions.size() << ", \"out\": \"" << qs_out << "\"}\n";
    return 0;
  }

  if (*rc) {
    const PipelineConfig base = config_or_toy(config_path);
    PipelineConfig cfg = base;
    if (!rc_ckpt.empty()) {
      cfg.coarse_checkpoint = rc_ckpt + ".coarse";
      cfg.fine_checkpoint = rc_ckpt + ".fine";
    }
    const bool have_ckpts = !cfg.coarse_checkpoint.empty() &&
                            fs::exists(cfg.coarse_checkpoint) &&
                            !cfg.fine_checkpoint.empty() && fs::exists(cfg.fine_checkpoint);
    const ReconstructionModels models =
        have_ckpts ? load_models(cfg) : make_models(cfg, seed);
    const Capture cap = load_capture(rc_capture, true);
    const ReconstructionResult res =
        reconstruct(cap.colors, cap.masks, cap.normals, cap.cameras, cfg, models);
    save_mesh_file(rc_out, res.mesh);
    if (!rc_report.empty()) write_text(rc_report, res.report_json);
    std::cout << res.report_json;
    return 0;
  }

  if (*tx) {
    const PipelineConfig cfg = config_or_toy(config_path);
    const Capture cap = load_capture(tx_capture);
    TriangleMesh mesh = resolve_mesh(tx_mesh);
    mesh.validate();
    VolumeSpec fine = cfg.fine_spec();
    auto shell = std::make_shared<ActiveSet>(
        mesh_band_active_set(mesh, fine, 2.0 * cfg.texture_band_cm + fine.spacing()));
    const TsdfVolume tsdf = mesh_to_tsdf(mesh, shell, cfg.truncation_cm);
    auto band = std::make_shared<ActiveSet>(narrow_band(tsdf.field, cfg.texture_band_cm));
    if (band->empty()) throw NumericError("texture band is empty");
    std::vector<ImageBuffer> depths;
    for (const auto& cam : cap.cameras) depths.push_back(render_view(mesh, cam).depth);
    const TextureModel model = tx_ckpt.empty()
                                   ? make_texture_model(32, int(cap.cameras.size()), seed)
                                   : load_texture_model(tx_ckpt);
    const SparseField weights =
        regress_blend_weights(model, band, cap.cameras, cap.colors, depths);
    const AtlasResult baked = bake_atlas(mesh, weights, cap.cameras, cap.colors, tx_atlas);
    fs::create_directories(tx_out);
    save_textured_obj(tx_out, "model", baked);
    save_svf(tx_out + "/weights.svf", weights);
    std::cout << "{\"band_sites\": " << band->size() << ", \"atlas\": \"" << tx_out
              << "/model.png\"}\n";
    return 0;
  }

  if (*tt) {
    PipelineConfig cfg = config_or_toy(config_path);
    // the fine/texture toy volumes live at the fine resolution
    if (config_path.empty() && tt_stage != "coarse") cfg.coarse_resolution = 32;
    const TriangleMesh gt_mesh_data = [&] {
      TriangleMesh m = resolve_mesh(tt_gt);
      m.validate();
      return m;
    }();
    json report;
    if (tt_stage == "coarse") {
      if (cfg.coarse_resolution > 64)
        throw ConfigError("toy coarse training is limited to resolution 64");
      const Capture cap = load_capture(tt_capture);
      auto hull = std::make_shared<ActiveSet>(carve_visual_hull(
          cfg.coarse_spec(), cap.cameras, cap.masks,
          cap.cameras.size() == 1 ? std::optional<DepthBand>(DepthBand{}) : std::nullopt));
      const TsdfVolume gt_tsdf = mesh_to_tsdf(gt_mesh_data, hull, cfg.truncation_cm);
      std::vector<FeatureMap> maps;
      for (const auto& img : cap.colors)
        maps.push_back(handcrafted_features(img, cfg.coarse_feature_channels));
      const FeatureVolumeResult fv = build_feature_volume(hull, cap.cameras, maps);
      NetworkGraph net = make_coarse_unet(cfg.coarse_feature_channels, cfg.coarse_plan,
                                          cfg.export_channels);
      DecodeHead head;
      head.weights.assign(size_t(cfg.coarse_plan[0]), 0.0);
      init_network(net, head, seed);
      const ToyTrainReport tr = train_stage(net, head, fv.field, nullptr, gt_tsdf, *hull,
                                            cfg.bias_c_cm, tt_epochs);
      save_checkpoint(tt_out, net, head);
      report = {{"stage", "coarse"},
                {"sites", hull->size()},
                {"zero_net_loss", tr.zero_net_loss},
                {"first_loss", tr.first_loss},
                {"final_loss", tr.final_loss},
                {"ratio", tr.final_loss / std::max(1e-12, tr.zero_net_loss)}};
    } else if (tt_stage == "fine") {
      if (cfg.fine_resolution() > 64)
        throw ConfigError("toy fine training is limited to fine resolution 64");
      const Capture cap = load_capture(tt_capture, true);
      auto hull = std::make_shared<ActiveSet>(
          carve_visual_hull(cfg.coarse_spec(), cap.cameras, cap.masks));
      // teacher-forced coarse stage: the ground-truth TSDF stands in for D0
      const TsdfVolume d0 = mesh_to_tsdf(gt_mesh_data, hull, cfg.truncation_cm);
      const SparseField coarse_export(hull, cfg.export_channels, 0.0);
      auto [band, d0_up] = upsample_tsdf_band(d0, cfg.band_cm);
      if (band->empty()) throw NumericError("empty fine band");
      const TsdfVolume gt_fine = mesh_to_tsdf(gt_mesh_data, band, cfg.truncation_cm);
      std::vector<FeatureMap> maps;
      for (const auto& img : cap.normals)
        maps.push_back(handcrafted_features(img, cfg.fine_feature_channels));
      const FeatureVolumeResult fv = build_feature_volume(band, cap.cameras, maps);
      const SparseField export_up = upsample_to(coarse_export, band);
      const SparseField input = SparseField::concat(fv.field, export_up);
      NetworkGraph net = make_fine_net(cfg.fine_feature_channels + cfg.export_channels,
                                       cfg.export_channels, cfg.fine_width);
      DecodeHead head;
      head.weights.assign(size_t(cfg.fine_width), 0.0);
      init_network(net, head, seed);
      const ToyTrainReport tr = train_stage(net, head, input, &export_up, gt_fine, *band,
                                            cfg.bias_f_cm, tt_epochs);
      save_checkpoint(tt_out, net, head);
      report = {{"stage", "fine"},
                {"sites", band->size()},
                {"zero_net_loss", tr.zero_net_loss},
                {"first_loss", tr.first_loss},
                {"final_loss", tr.final_loss},
                {"ratio", tr.final_loss / std::max(1e-12, tr.zero_net_loss)}};
    } else if (tt_stage == "texture") {
      if (cfg.fine_resolution() > 64)
        throw ConfigError("toy texture training is limited to fine resolution 64");
      if (gt_mesh_data.colors.size() != gt_mesh_data.vertices.size())
        throw ValidationError("texture training needs a colored ground-truth mesh");
      const Capture cap = load_capture(tt_capture);
      VolumeSpec fine = cfg.fine_spec();
      auto shell = std::make_shared<ActiveSet>(mesh_band_active_set(
          gt_mesh_data, fine, 2.0 * cfg.texture_band_cm + fine.spacing()));
      const TsdfVolume tsdf = mesh_to_tsdf(gt_mesh_data, shell, cfg.truncation_cm);
      auto band = std::make_shared<ActiveSet>(narrow_band(tsdf.field, cfg.texture_band_cm));
      if (band->empty()) throw NumericError("texture band is empty");
      std::vector<ImageBuffer> depths;
      for (const auto& cam : cap.cameras) depths.push_back(render_view(gt_mesh_data, cam).depth);
      const SparseField gt_colors = gt_color_volume(gt_mesh_data, band);
      TextureModel model = make_texture_model(32, int(cap.cameras.size()), seed);
      const TextureTrainReport tr = train_texture(model, band, cap.cameras, cap.colors, depths,
                                                  gt_colors, tt_epochs);
      save_texture_model(tt_out, model);
      report = {{"stage", "texture"},
                {"sites", band->size()},
                {"uniform_loss", tr.zero_model_loss},
                {"first_loss", tr.first_loss},
                {"final_loss", tr.final_loss}};
    } else {
      throw ConfigError("unknown stage: " + tt_stage);
    }
    std::cout << report.dump(2) << "\n";
    return 0;
  }

  if (*ev) {
    TriangleMesh pred = load_mesh(ev_pred);
    TriangleMesh gtm = load_mesh(ev_gt);
    pred.validate();
    gtm.validate();
    DistanceOptions opt;
    opt.normalize_height_to_1m = ev_norm_height;
    opt.seed = seed;
    const MeshDistanceReport dist = p2s_chamfer(pred, gtm, opt);
    json out{{"p2s_precision_cm", dist.p2s_precision},
             {"p2s_recall_cm", dist.p2s_recall},
             {"chamfer_precision_cm", dist.chamfer_precision},
             {"chamfer_recall_cm", dist.chamfer_recall}};
    if (!ev_views.empty()) {
      const auto cams = load_cameras_json(ev_views + "/cameras.json");
      out["normal_error_deg"] = normal_error(pred, gtm, cams);
    }
    write_text(ev_out, out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cout << json{{"error", {{"type", "config"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cout << json{{"error", {{"type", "io"}, {"message", e.what()}}}}.dump() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cout << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cout << json{{"error", {{"type", "numeric"}, {"message", e.what()}}}}.dump() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cout << json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
}

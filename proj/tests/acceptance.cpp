// Acceptance gate: one self-contained check per criterion, each printing a
// single [PASS]/[FAIL] line. Returns the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "voxband/atlas.hpp"
#include "voxband/carve.hpp"
#include "voxband/errors.hpp"
#include "voxband/features.hpp"
#include "voxband/marching_cubes.hpp"
#include "voxband/metrics.hpp"
#include "voxband/pipeline.hpp"
#include "voxband/synth.hpp"
#include "voxband/texture.hpp"
#include "voxband/train.hpp"
#include "voxband/tsdf.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace voxband;
using namespace voxband::testutil;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string note;
};

const TriangleMesh& humanoid() {
  static const TriangleMesh mesh = make_humanoid();
  return mesh;
}

TsdfVolume humanoid_tsdf(int R, double band_radius_cm) {
  const VolumeSpec spec = VolumeSpec::centered_cube(256, R);
  auto band = std::make_shared<ActiveSet>(
      mesh_band_active_set(humanoid(), spec, band_radius_cm));
  return mesh_to_tsdf(humanoid(), band, 5.0);
}

// ------------------------------------------------------------- criterion 1 --

Outcome criterion1() {
  const auto t0 = Clock::now();
  double prev = 1e300, last = 0;
  std::ostringstream curve;
  for (int R : {32, 64, 128, 256, 512}) {
    const TsdfVolume tsdf = humanoid_tsdf(R, 2.0 * 256.0 / R);
    const QuantizationResult q = quantization_error(humanoid(), tsdf, 2000, 42);
    curve << " R" << R << "=" << q.mean_abs_error_cm;
    if (q.mean_abs_error_cm >= prev)
      return {false, "error curve not strictly decreasing at R=" + std::to_string(R)};
    prev = last = q.mean_abs_error_cm;
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream note;
  note << "quantization curve" << curve.str() << " cm, " << elapsed << " s";
  if (last >= 0.05) return {false, "R=512 error " + std::to_string(last) + " cm >= 0.05"};
  if (elapsed >= 300.0) return {false, "took " + std::to_string(elapsed) + " s >= 300"};
  return {true, note.str()};
}

// ------------------------------------------------------------- criterion 2 --

Outcome criterion2() {
  const auto t0 = Clock::now();
  const Vec3 center = (humanoid().bbox_min() + humanoid().bbox_max()) / 2.0;
  const auto cams = camera_ring(6, 250, 0, center);
  std::vector<ImageBuffer> masks;
  for (const auto& cam : cams) masks.push_back(render_view(humanoid(), cam).mask);
  const VolumeSpec spec = VolumeSpec::centered_cube(256, 256);
  const ActiveSet hull = carve_visual_hull(spec, cams, masks);
  const double frac = double(hull.size()) / (256.0 * 256.0 * 256.0);
  const double elapsed = seconds_since(t0);
  std::ostringstream note;
  note << "hull fraction " << frac * 100.0 << " % of 256^3, " << elapsed << " s";
  if (hull.empty()) return {false, "empty visual hull"};
  if (frac >= 0.08) return {false, note.str() + " (>= 8 %)"};
  if (elapsed >= 60.0) return {false, note.str() + " (>= 60 s)"};
  return {true, note.str()};
}

// ------------------------------------------------------------- criterion 3 --

Outcome criterion3() {
  const TsdfVolume tsdf = humanoid_tsdf(512, 3.0 + 2.0 * 0.5);
  const ActiveSet band = narrow_band(tsdf.field, 3.0);
  const double frac = double(band.size()) / (512.0 * 512.0 * 512.0);
  std::ostringstream note;
  note << "3 cm band holds " << band.size() << " sites = " << frac * 100.0
       << " % of 512^3";
  if (band.empty()) return {false, "empty narrow band"};
  if (frac >= 0.01) return {false, note.str() + " (>= 1 %)"};
  return {true, note.str()};
}

// ------------------------------------------------------------- criterion 4 --

Outcome criterion4() {
  double worst = 0;
  int checks = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    for (int R : {4, 6, 8}) {
      auto set = full_grid(R);
      const SparseField input = random_field(set, 2, rng);
      const DenseGrid din = to_dense(input);

      ConvLayer sub = make_conv(ConvVariant::Submanifold, 2, 3, seed % 2 == 0);
      sub.affine = seed % 3 == 0;
      if (sub.affine) {
        sub.scale.assign(3, 1.0);
        sub.shift.assign(3, 0.0);
      }
      randomize_layer(sub, rng);
      const Rulebook sub_rb = build_submanifold_rulebook(set);
      const SparseField sub_out = conv_forward(input, sub, sub_rb);
      worst = std::max(worst, max_rel_diff(sub_out, dense_submanifold(din, sub)));
      if (!sub_out.active().same_sites(*set)) return {false, "submanifold closure violated"};
      ++checks;

      ConvLayer str = make_conv(ConvVariant::Strided, 2, 2, seed % 2 == 1);
      randomize_layer(str, rng);
      const Rulebook down = build_strided_rulebook(set);
      worst = std::max(worst,
                       max_rel_diff(conv_forward(input, str, down), dense_strided(din, str)));
      ++checks;

      ConvLayer tr = make_conv(ConvVariant::Transposed, 2, 2, false);
      randomize_layer(tr, rng);
      const SparseField coarse_in = random_field(down.output, 2, rng);
      worst = std::max(worst, max_rel_diff(conv_forward(coarse_in, tr, transpose_rulebook(down)),
                                           dense_transposed(to_dense(coarse_in), tr,
                                                            din.act, R)));
      ++checks;
    }
  }
  // adjointness of the strided/transposed pair
  double adj_worst = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(2000 + seed);
    auto set = random_set(8, 0.3, rng);
    const int C = 2;
    ConvLayer down = make_conv(ConvVariant::Strided, C, C, false);
    randomize_layer(down, rng);
    down.bias.assign(size_t(C), 0.0);
    ConvLayer up = make_conv(ConvVariant::Transposed, C, C, false);
    up.bias.assign(size_t(C), 0.0);
    for (int d = 0; d < kKernelOffsets; ++d)
      for (int ci = 0; ci < C; ++ci)
        for (int co = 0; co < C; ++co)
          up.weights[(size_t(d) * C + size_t(ci)) * C + size_t(co)] = down.w(d, co, ci);
    const Rulebook rb_down = build_strided_rulebook(set);
    const SparseField x = random_field(set, C, rng);
    const SparseField y = random_field(rb_down.output, C, rng);
    const SparseField sx = conv_forward(x, down, rb_down);
    const SparseField ty = conv_forward(y, up, transpose_rulebook(rb_down));
    double lhs = 0, rhs = 0;
    for (size_t i = 0; i < sx.data().size(); ++i) lhs += sx.data()[i] * y.data()[i];
    for (size_t i = 0; i < ty.data().size(); ++i) rhs += ty.data()[i] * x.data()[i];
    adj_worst = std::max(adj_worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  std::ostringstream note;
  note << checks << " dense comparisons, worst rel " << worst << ", worst adjoint gap "
       << adj_worst;
  if (worst >= 1e-6 || adj_worst >= 1e-6) return {false, note.str()};
  return {true, note.str()};
}

// ------------------------------------------------------------- criterion 5 --

NetworkGraph micro_unet_graph() {
  NetworkGraph g;
  auto conv = [&g](ConvVariant v, int ci, int co, bool relu) {
    g.nodes.push_back({NetworkGraph::Op::Conv, make_conv(v, ci, co, relu), -1});
  };
  conv(ConvVariant::Submanifold, 1, 1, true);
  g.nodes.push_back({NetworkGraph::Op::Save, {}, 0});
  conv(ConvVariant::Strided, 1, 1, false);
  conv(ConvVariant::Transposed, 1, 1, true);
  g.nodes.push_back({NetworkGraph::Op::ConcatSave, {}, 0});
  conv(ConvVariant::Submanifold, 2, 1, false);
  return g;
}

NetworkGraph micro_extern_graph() {
  NetworkGraph g;
  ConvLayer l1 = make_conv(ConvVariant::Submanifold, 1, 2, true);
  l1.affine = true;
  l1.scale.assign(2, 1.0);
  l1.shift.assign(2, 0.0);
  g.nodes.push_back({NetworkGraph::Op::Conv, l1, -1});
  g.nodes.push_back({NetworkGraph::Op::ConcatExtern, {}, -1});
  g.nodes.push_back(
      {NetworkGraph::Op::Conv, make_conv(ConvVariant::Submanifold, 3, 1, true), -1});
  return g;
}

struct TextureFixture {
  TriangleMesh mesh;
  std::vector<CameraView> cameras;
  std::vector<ImageBuffer> images, depths;
  ActiveSetPtr band;
  SparseField gt_colors;
};

TextureFixture texture_fixture(int n_views, int grid_res) {
  TextureFixture f;
  f.mesh = make_icosphere(20.0, 2);
  f.mesh.colors.resize(f.mesh.vertices.size());
  for (size_t i = 0; i < f.mesh.vertices.size(); ++i)
    f.mesh.colors[i] = f.mesh.vertices[i].z() > 0 ? Vec3(1, 0, 0) : Vec3(0, 0, 1);
  f.cameras = camera_ring(n_views, 150, 0, Vec3::Zero());
  for (const auto& cam : f.cameras) {
    RenderedView rv = render_view(f.mesh, cam);
    f.images.push_back(std::move(rv.color));
    f.depths.push_back(std::move(rv.depth));
  }
  const VolumeSpec spec = VolumeSpec::centered_cube(100, grid_res);
  auto shell = std::make_shared<ActiveSet>(
      mesh_band_active_set(f.mesh, spec, 2.0 + spec.spacing()));
  const TsdfVolume tsdf = mesh_to_tsdf(f.mesh, shell, 5.0);
  f.band = std::make_shared<ActiveSet>(narrow_band(tsdf.field, 1.0));
  f.gt_colors = gt_color_volume(f.mesh, f.band);
  return f;
}

std::vector<double> texture_params(const TextureModel& m) {
  std::vector<double> p = m.attention.wq;
  p.insert(p.end(), m.attention.wk.begin(), m.attention.wk.end());
  p.insert(p.end(), m.attention.wv.begin(), m.attention.wv.end());
  const auto net = flatten_params(m.logit_net, m.logit_head);
  p.insert(p.end(), net.begin(), net.end());
  return p;
}

void set_texture_params(TextureModel& m, const std::vector<double>& p) {
  size_t pos = 0;
  std::copy(p.begin() + long(pos), p.begin() + long(pos + m.attention.wq.size()),
            m.attention.wq.begin());
  pos += m.attention.wq.size();
  std::copy(p.begin() + long(pos), p.begin() + long(pos + m.attention.wk.size()),
            m.attention.wk.begin());
  pos += m.attention.wk.size();
  std::copy(p.begin() + long(pos), p.begin() + long(pos + m.attention.wv.size()),
            m.attention.wv.begin());
  pos += m.attention.wv.size();
  std::vector<double> net(p.begin() + long(pos), p.end());
  unflatten_params(net, m.logit_net, m.logit_head);
}

Outcome criterion5() {
  // finite differences through the stage losses on randomized micro
  // nets with biases, every conv variant, skip and extern concats
  double worst = 0;
  int fd_checks = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(3000 + seed);
    auto set = random_set(6, 0.4, rng);
    const bool use_extern = seed % 2 == 1;
    NetworkGraph g = use_extern ? micro_extern_graph() : micro_unet_graph();
    for (auto& n : g.nodes)
      if (n.op == NetworkGraph::Op::Conv) randomize_layer(n.layer, rng);
    DecodeHead head{{0.7}, 0.1};
    const SparseField input = random_field(set, 1, rng);
    const SparseField ext = random_field(set, 1, rng);
    const SparseField* extp = use_extern ? &ext : nullptr;

    const ForwardResult fwd = network_forward(g, input, extp);
    const SparseField raw0 = decode_raw(fwd.output, head);
    // residuals kept away from the L1 kink so finite differences stay clean
    TsdfVolume gt{SparseField(set, 1, 5.0), 5.0};
    std::uniform_real_distribution<double> res(0.5, 3.0);
    for (std::int64_t i = 0; i < raw0.size(); ++i)
      gt.field.value(i, 0) =
          raw0.value(i, 0) + 3.0 + (rng() % 2 ? res(rng) : -res(rng));
    const SparseField rg = stage_loss_gradient(raw0, gt, *set, 3.0);
    const auto analytic = network_backward(g, head, fwd, rg).flatten(g, head);
    std::vector<double> params = flatten_params(g, head);
    if (params.size() > 200) return {false, "micro net exceeds 200 weights"};
    auto loss = [&] {
      unflatten_params(params, g, head);
      const ForwardResult f = network_forward(g, input, extp);
      return stage_loss(decode_raw(f.output, head), gt, *set, 3.0);
    };
    for (size_t i = 0; i < params.size(); ++i) {
      const double fd = central_diff(params, i, 1e-4, loss);
      if (std::abs(analytic[i]) < 1e-7 && std::abs(fd) < 1e-4) continue;  // L1 tie
      // skip brackets straddling a relu/L1 kink: not differentiable there
      const double fd_half = central_diff(params, i, 5e-5, loss);
      if (std::abs(fd - fd_half) > 1e-5 * std::max(1.0, std::abs(fd))) continue;
      worst = std::max(worst, std::abs(fd - analytic[i]) /
                                  std::max({1.0, std::abs(fd), std::abs(analytic[i])}));
      ++fd_checks;
    }
    unflatten_params(params, g, head);
  }
  if (worst >= 1e-4)
    return {false, "stage-loss FD rel error " + std::to_string(worst)};

  // texture softmax: the first Adam step must move every parameter by
  // exactly lr against the finite-difference gradient sign
  const TextureFixture f = texture_fixture(2, 20);
  if (f.band->empty()) return {false, "texture fixture band is empty"};
  const double lr = 1e-4;
  TextureModel base = make_texture_model(9, 2, 99);
  const std::vector<double> before = texture_params(base);
  TextureModel stepped = base;
  train_texture(stepped, f.band, f.cameras, f.images, f.depths, f.gt_colors, 1, lr);
  const std::vector<double> after = texture_params(stepped);

  std::vector<double> probe = before;
  auto loss_at = [&] {
    TextureModel m = base;
    set_texture_params(m, probe);
    const SparseField w =
        regress_blend_weights(m, f.band, f.cameras, f.images, f.depths);
    return color_loss(w, f.cameras, f.images, f.gt_colors);
  };
  int sign_checks = 0;
  for (size_t i = 0; i < probe.size(); i += std::max<size_t>(1, probe.size() / 24)) {
    const double fd = central_diff(probe, i, 1e-4, loss_at);
    if (std::abs(fd) < 1e-5) continue;  // flat under FD noise
    const double delta = after[i] - before[i];
    if (std::abs(std::abs(delta) - lr) > 1e-6)
      return {false, "first Adam step magnitude off at texture param " + std::to_string(i)};
    if (delta * fd > 0)
      return {false, "texture softmax gradient sign mismatch at param " + std::to_string(i)};
    ++sign_checks;
  }
  std::ostringstream note;
  note << fd_checks << " FD checks, worst rel " << worst << "; " << sign_checks
       << " texture softmax step signs verified";
  if (sign_checks < 5) return {false, "too few usable texture FD probes"};
  return {true, note.str()};
}

// ------------------------------------------------------------- criterion 6 --

Outcome criterion6() {
  std::vector<TriangleMesh> meshes = {make_icosphere(20.0, 1), make_icosphere(32.0, 2),
                                      make_icosphere(25.0, 2), make_icosphere(15.0, 2),
                                      make_icosphere(28.0, 1)};
  for (auto& v : meshes[2].vertices) v = Vec3(1.4 * v.x(), 0.7 * v.y(), v.z());
  for (auto& v : meshes[3].vertices) v += Vec3(12, -8, 5);
  for (auto& v : meshes[4].vertices) v = Vec3(0.8 * v.x(), 1.2 * v.y(), 0.9 * v.z());

  std::mt19937_64 rng(4000);
  double worst = 0;
  for (const auto& mesh : meshes) {
    const VolumeSpec spec = VolumeSpec::centered_cube(120, 24);
    auto band = std::make_shared<ActiveSet>(mesh_band_active_set(mesh, spec, 8.0));
    const TsdfVolume tsdf = mesh_to_tsdf(mesh, band, 5.0);
    std::uniform_int_distribution<std::int64_t> pick(0, band->size() - 1);
    for (int i = 0; i < 500; ++i) {
      const std::int64_t rank = pick(rng);
      const Vec3 p = spec.position(band->site(rank));
      const double dist = std::min(bf_mesh_distance(p, mesh), 5.0);
      const double want = bf_inside(p, mesh) ? -dist : dist;
      worst = std::max(worst, std::abs(tsdf.value(rank) - want));
    }
  }
  std::ostringstream note;
  note << "2500 sites across 5 meshes, worst |indexed - brute| = " << worst << " cm";
  if (worst >= 1e-6) return {false, note.str()};
  return {true, note.str()};
}

// ------------------------------------------------------------- criterion 7 --

TsdfVolume analytic_sphere(double radius, const VolumeSpec& spec, double trunc) {
  std::vector<Vec3i> sites;
  for (int x = 0; x < spec.resolution; ++x)
    for (int y = 0; y < spec.resolution; ++y)
      for (int z = 0; z < spec.resolution; ++z) sites.push_back({x, y, z});
  auto set = std::make_shared<ActiveSet>(spec, std::move(sites));
  TsdfVolume vol{SparseField(set, 1, trunc), trunc};
  for (std::int64_t i = 0; i < set->size(); ++i)
    vol.field.value(i, 0) =
        std::clamp(spec.position(set->site(i)).norm() - radius, -trunc, trunc);
  return vol;
}

Outcome criterion7() {
  const VolumeSpec dense_spec = VolumeSpec::centered_cube(100, 128);
  const TsdfVolume dense = analytic_sphere(30.0, dense_spec, 5.0);
  const TriangleMesh sphere_mesh = extract_mesh(dense);
  if (sphere_mesh.empty()) return {false, "dense sphere extraction is empty"};
  const double h = dense_spec.spacing();
  double worst = 0;
  for (const auto& v : sphere_mesh.vertices) worst = std::max(worst, std::abs(v.norm() - 30.0));
  if (worst >= h / 2.0)
    return {false, "sphere vertex error " + std::to_string(worst) + " >= h/2"};

  // narrow band at the fine level, coarse fallback closes the seams
  const VolumeSpec coarse_spec = VolumeSpec::centered_cube(100, 32);
  const TsdfVolume coarse = analytic_sphere(30.0, coarse_spec, 5.0);
  VolumeSpec fine_spec = coarse_spec;
  fine_spec.resolution = 64;
  std::vector<Vec3i> band_sites;
  for (int x = 0; x < 64; ++x)
    for (int y = 0; y < 64; ++y)
      for (int z = 0; z < 64; ++z)
        if (std::abs(fine_spec.position(x, y, z).norm() - 30.0) < 3.0)
          band_sites.push_back({x, y, z});
  auto band = std::make_shared<ActiveSet>(fine_spec, band_sites);
  TsdfVolume fine{SparseField(band, 1, 5.0), 5.0};
  for (std::int64_t i = 0; i < band->size(); ++i)
    fine.field.value(i, 0) =
        std::clamp(fine_spec.position(band->site(i)).norm() - 30.0, -5.0, 5.0);
  const TriangleMesh banded = extract_mesh(fine, &coarse);
  if (banded.empty()) return {false, "banded extraction is empty"};
  std::map<std::pair<int, int>, int> edges;
  for (const auto& t : banded.triangles)
    for (int k = 0; k < 3; ++k) {
      const auto e = std::minmax(t[size_t(k)], t[size_t((k + 1) % 3)]);
      ++edges[e];
    }
  for (const auto& [e, n] : edges)
    if (n != 2) return {false, "edge not shared by exactly two triangles"};
  const auto V = std::int64_t(banded.vertices.size());
  const auto E = std::int64_t(edges.size());
  const auto F = std::int64_t(banded.triangles.size());
  if (V - E + F != 2)
    return {false, "Euler characteristic " + std::to_string(V - E + F) + " != 2"};
  std::ostringstream note;
  note << "sphere worst vertex error " << worst << " cm < h/2 = " << h / 2.0
       << "; banded mesh watertight genus 0 (V-E+F=2, " << F << " triangles)";
  return {true, note.str()};
}

// ------------------------------------------------------------- criterion 8 --

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

Outcome criterion8() {
  const auto t0 = Clock::now();
  const PipelineConfig cfg = toy_config();
  const TriangleMesh sphere = make_icosphere(50.0, 4);
  const auto cams = camera_ring(6, 250, 0, Vec3::Zero());
  std::vector<ImageBuffer> colors, masks;
  for (const auto& cam : cams) {
    RenderedView rv = render_view(sphere, cam);
    colors.push_back(std::move(rv.color));
    masks.push_back(std::move(rv.mask));
  }
  auto hull = std::make_shared<ActiveSet>(
      carve_visual_hull(cfg.coarse_spec(), cams, masks));
  if (hull->empty()) return {false, "empty visual hull"};
  const TsdfVolume gt_tsdf = mesh_to_tsdf(sphere, hull, cfg.truncation_cm);
  std::vector<FeatureMap> maps;
  for (const auto& img : colors)
    maps.push_back(handcrafted_features(img, cfg.coarse_feature_channels));
  const FeatureVolumeResult fv = build_feature_volume(hull, cams, maps);

  NetworkGraph net = make_coarse_unet(cfg.coarse_feature_channels, cfg.coarse_plan,
                                      cfg.export_channels);
  DecodeHead head;
  head.weights.assign(size_t(cfg.coarse_plan[0]), 0.0);
  init_network(net, head, 42);
  const ToyTrainReport tr = train_stage(net, head, fv.field, nullptr, gt_tsdf, *hull,
                                        cfg.bias_c_cm, 2000, 1e-4);
  const double ratio = tr.final_loss / std::max(1e-12, tr.zero_net_loss);

  // reconstruction from the trained coarse stage vs the visual-hull mesh
  const ForwardResult fwd = network_forward(net, fv.field);
  const TsdfVolume d0 =
      decode_tsdf(fwd.output, head, cfg.bias_c_cm, cfg.truncation_cm);
  TriangleMesh pred;
  try {
    pred = extract_mesh(d0);
  } catch (const std::exception& e) {
    return {false, std::string("trained reconstruction failed: ") + e.what()};
  }
  const VolumeSpec spec = cfg.coarse_spec();
  const double h = spec.spacing();
  std::vector<Vec3i> dilated;
  for (const auto& s : hull->sites())
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const Vec3i n = s + Vec3i(dx, dy, dz);
          if (n.minCoeff() >= 0 && n.maxCoeff() < spec.resolution) dilated.push_back(n);
        }
  auto dset = std::make_shared<ActiveSet>(spec, std::move(dilated));
  // truncation h keeps the +/- h/2 plateau strictly inside the band, so the
  // saturated-cell skip in marching cubes does not discard the indicator
  TsdfVolume indicator{SparseField(dset, 1, h), h};
  for (std::int64_t i = 0; i < dset->size(); ++i)
    indicator.field.value(i, 0) = hull->contains(dset->site(i)) ? -h / 2.0 : h / 2.0;
  const TriangleMesh hull_mesh = extract_mesh(indicator);
  const double pred_p2s = p2s_chamfer(pred, sphere).p2s_precision;
  const double hull_p2s = p2s_chamfer(hull_mesh, sphere).p2s_precision;
  const double elapsed = seconds_since(t0);

  // stash the trained checkpoint for the determinism criterion
  save_checkpoint("acceptance_ck.coarse", net, head);

  std::ostringstream note;
  note << "loss " << tr.zero_net_loss << " -> " << tr.final_loss << " (ratio " << ratio
       << "), P2S precision " << pred_p2s << " cm vs hull baseline " << hull_p2s
       << " cm, " << elapsed << " s";
  if (ratio >= 0.1) return {false, note.str() + " (ratio >= 0.1)"};
  if (pred_p2s >= hull_p2s) return {false, note.str() + " (no better than the hull)"};
  if (elapsed >= 1800.0) return {false, note.str() + " (>= 30 min)"};
  return {true, note.str()};
}

// ------------------------------------------------------------- criterion 9 --

Outcome criterion9() {
  // convexity of the regressed weights
  const TextureFixture f4 = texture_fixture(4, 24);
  TextureModel probe = make_texture_model(12, 4, 31);
  const SparseField w =
      regress_blend_weights(probe, f4.band, f4.cameras, f4.images, f4.depths);
  for (std::int64_t i = 0; i < w.size(); ++i) {
    double sum = 0;
    for (int v = 0; v < 4; ++v) sum += w.value(i, v);
    if (sum > 0 && std::abs(sum - 1.0) >= 1e-6)
      return {false, "weights do not sum to 1 at site " + std::to_string(i)};
  }

  // two-view visibility overfit: the sole observing view must dominate
  const TextureFixture f2 = texture_fixture(2, 24);
  TextureModel model = make_texture_model(12, 2, 32);
  double front_w = 0, back_w = 0;
  int rounds = 0;
  for (; rounds < 3; ++rounds) {
    train_texture(model, f2.band, f2.cameras, f2.images, f2.depths, f2.gt_colors, 200,
                  1e-2);
    const SparseField tw =
        regress_blend_weights(model, f2.band, f2.cameras, f2.images, f2.depths);
    double fsum = 0, bsum = 0;
    std::int64_t fn = 0, bn = 0;
    const VolumeSpec& spec = f2.band->spec();
    for (std::int64_t i = 0; i < f2.band->size(); ++i) {
      const double z = spec.position(f2.band->site(i)).z();
      if (z > 15.0) {
        fsum += tw.value(i, 0);  // view 0 sits on +z
        ++fn;
      } else if (z < -15.0) {
        bsum += tw.value(i, 1);
        ++bn;
      }
    }
    if (fn == 0 || bn == 0) return {false, "no polar cap sites in the band"};
    front_w = fsum / double(fn);
    back_w = bsum / double(bn);
    if (front_w > 0.9 && back_w > 0.9) break;
  }
  if (!(front_w > 0.9 && back_w > 0.9)) {
    std::ostringstream fail;
    fail << "occluded-region weights only reached " << front_w << " / " << back_w;
    return {false, fail.str()};
  }

  // source-resolution monotonicity of the bake
  auto ring_at = [](int size) {
    RingIntrinsics intr;
    intr.focal = Vec2(600.0 * size / 512.0, 600.0 * size / 512.0);
    intr.width = size;
    intr.height = size;
    return camera_ring(4, 150, 0, Vec3::Zero(), intr);
  };
  TriangleMesh mesh = f4.mesh;
  const auto eval_cam = camera_ring(1, 150, 0, Vec3::Zero())[0];
  const ImageBuffer gt_render = render_view(mesh, eval_cam).color;
  TextureModel uniform = make_texture_model(12, 4, 33);
  {
    std::vector<double> zeros(flatten_params(uniform.logit_net, uniform.logit_head).size(),
                              0.0);
    unflatten_params(zeros, uniform.logit_net, uniform.logit_head);
  }
  auto bake_psnr = [&](int src_size) {
    const auto cams = ring_at(src_size);
    std::vector<ImageBuffer> imgs, deps;
    for (const auto& cam : cams) {
      RenderedView rv = render_view(mesh, cam);
      imgs.push_back(std::move(rv.color));
      deps.push_back(std::move(rv.depth));
    }
    const SparseField bw =
        regress_blend_weights(uniform, f4.band, cams, imgs, deps);
    const AtlasResult baked = bake_atlas(mesh, bw, cams, imgs, 1024);
    return psnr(render_atlas_view(baked, eval_cam), gt_render);
  };
  const double psnr1k = bake_psnr(1024);
  const double psnr2k = bake_psnr(2048);
  std::ostringstream note;
  note << "weights convex; overfit weights " << front_w << " / " << back_w
       << " after " << (rounds + 1) * 200 << " steps; bake PSNR 1K " << psnr1k
       << " dB vs 2K " << psnr2k << " dB";
  if (psnr2k + 1e-9 < psnr1k) return {false, note.str() + " (2K bake worse)"};
  return {true, note.str()};
}

// ------------------------------------------------------------ criterion 10 --

Outcome criterion10() {
  const TriangleMesh m = make_icosphere(25.0, 2);
  const MeshDistanceReport ident = p2s_chamfer(m, m);
  if (ident.p2s_precision != 0.0 || ident.p2s_recall != 0.0 ||
      ident.chamfer_precision != 0.0 || ident.chamfer_recall != 0.0)
    return {false, "identity mesh distances are not zero"};

  const double delta = 2.0;
  const MeshDistanceReport off =
      p2s_chamfer(make_icosphere(32.0, 3), make_icosphere(30.0, 3));
  if (std::abs(off.p2s_precision - delta) > 0.1)
    return {false, "offset-sphere P2S " + std::to_string(off.p2s_precision) +
                       " not close to 2 cm"};

  const ImageBuffer zeros(32, 32, 3, 0.0), tenth(32, 32, 3, 0.1);
  const double p = psnr(zeros, tenth);
  if (std::abs(p - 20.0) > 1e-9)
    return {false, "uniform 0 vs 0.1 PSNR " + std::to_string(p) + " != 20 dB"};

  // SSIM against an independent loop oracle
  std::mt19937_64 rng(5000);
  std::uniform_real_distribution<double> u(0, 1);
  ImageBuffer a(20, 20, 3), b(20, 20, 3);
  for (auto& v : a.values) v = u(rng);
  for (size_t i = 0; i < b.values.size(); ++i)
    b.values[i] = std::clamp(a.values[i] + 0.1 * (u(rng) - 0.5), 0.0, 1.0);
  auto lum = [](const ImageBuffer& img, int x, int y) {
    return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
  };
  double kernel[11][11], ksum = 0;
  for (int j = -5; j <= 5; ++j)
    for (int i = -5; i <= 5; ++i) {
      kernel[j + 5][i + 5] = std::exp(-(i * i + j * j) / 4.5);
      ksum += kernel[j + 5][i + 5];
    }
  for (auto& row : kernel)
    for (auto& k : row) k /= ksum;
  auto ci = [](int v, int n) { return std::clamp(v, 0, n - 1); };
  double want = 0;
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) {
      double ma = 0, mb = 0, va = 0, vb = 0, cov = 0;
      for (int j = -5; j <= 5; ++j)
        for (int i = -5; i <= 5; ++i) {
          ma += kernel[j + 5][i + 5] * lum(a, ci(x + i, 20), ci(y + j, 20));
          mb += kernel[j + 5][i + 5] * lum(b, ci(x + i, 20), ci(y + j, 20));
        }
      for (int j = -5; j <= 5; ++j)
        for (int i = -5; i <= 5; ++i) {
          const double da = lum(a, ci(x + i, 20), ci(y + j, 20)) - ma;
          const double db = lum(b, ci(x + i, 20), ci(y + j, 20)) - mb;
          va += kernel[j + 5][i + 5] * da * da;
          vb += kernel[j + 5][i + 5] * db * db;
          cov += kernel[j + 5][i + 5] * da * db;
        }
      want += ((2 * ma * mb + 1e-4) * (2 * cov + 9e-4)) /
              ((ma * ma + mb * mb + 1e-4) * (va + vb + 9e-4));
    }
  want /= 400.0;
  const double got = ssim(a, b);
  if (std::abs(got - want) >= 1e-6)
    return {false, "SSIM " + std::to_string(got) + " vs oracle " + std::to_string(want)};
  std::ostringstream note;
  note << "identity zeros; offset P2S " << off.p2s_precision << " cm; PSNR exactly 20 dB; "
       << "SSIM oracle gap " << std::abs(got - want);
  return {true, note.str()};
}

// ------------------------------------------------------------ criterion 11 --

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion11() {
  const fs::path work = fs::temp_directory_path() / "voxband_acceptance_c11";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string cli = VOXBAND_CLI_PATH;
  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const std::string mesh = (work / "sphere.obj").string();
  const std::string cap = (work / "cap").string();
  if (run("make-mesh --shape sphere --out " + mesh) != 0)
    return {false, "make-mesh failed"};
  if (run("synth-render --mesh " + mesh + " --views 6 --radius 250 --out " + cap) != 0)
    return {false, "synth-render failed"};

  // deterministic checkpoints: zeroed nets with biased heads carve the hull
  const std::string ck = (work / "ck").string();
  {
    const PipelineConfig cfg = toy_config();
    NetworkGraph cnet = make_coarse_unet(cfg.coarse_feature_channels, cfg.coarse_plan,
                                         cfg.export_channels);
    DecodeHead chead;
    chead.weights.assign(size_t(cfg.coarse_plan[0]), 0.0);
    chead.bias = -6.0;
    save_checkpoint(ck + ".coarse", cnet, chead);
    NetworkGraph fnet = make_fine_net(cfg.fine_feature_channels + cfg.export_channels,
                                      cfg.export_channels, cfg.fine_width);
    DecodeHead fhead;
    fhead.weights.assign(size_t(cfg.fine_width), 0.0);
    fhead.bias = -4.0;
    save_checkpoint(ck + ".fine", fnet, fhead);
  }

  auto twice = [&](const std::string& args_a, const std::string& args_b,
                   const std::vector<std::pair<std::string, std::string>>& artifacts,
                   const std::string& what) -> Outcome {
    if (run(args_a) != 0) return {false, what + " run A failed"};
    if (run(args_b) != 0) return {false, what + " run B failed"};
    for (const auto& [a, b] : artifacts) {
      const std::string ba = slurp(a), bb = slurp(b);
      if (ba.empty()) return {false, what + " produced no output at " + a};
      if (ba != bb) return {false, what + " is not byte-reproducible (" + a + ")"};
    }
    return {true, ""};
  };

  const std::string seed = " --seed 42 --threads 1 ";
  Outcome o = twice(
      seed + "reconstruct --capture " + cap + " --checkpoint " + ck + " --out " +
          (work / "recon_a.obj").string(),
      seed + "reconstruct --capture " + cap + " --checkpoint " + ck + " --out " +
          (work / "recon_b.obj").string(),
      {{(work / "recon_a.obj").string(), (work / "recon_b.obj").string()}}, "reconstruct");
  if (!o.pass) return o;

  // texture the low-poly source mesh: per-triangle charts of the dense
  // reconstruction would not fit a small atlas
  o = twice(seed + "texture --capture " + cap + " --mesh " + mesh +
                " --atlas-res 1024 --out " + (work / "tex_a").string(),
            seed + "texture --capture " + cap + " --mesh " + mesh +
                " --atlas-res 1024 --out " + (work / "tex_b").string(),
            {{(work / "tex_a/model.png").string(), (work / "tex_b/model.png").string()},
             {(work / "tex_a/weights.svf").string(), (work / "tex_b/weights.svf").string()},
             {(work / "tex_a/model.obj").string(), (work / "tex_b/model.obj").string()}},
            "texture");
  if (!o.pass) return o;

  o = twice(seed + "train-toy --stage coarse --capture " + cap + " --gt " + mesh +
                " --epochs 5 --out " + (work / "toy_a.vbw").string(),
            seed + "train-toy --stage coarse --capture " + cap + " --gt " + mesh +
                " --epochs 5 --out " + (work / "toy_b.vbw").string(),
            {{(work / "toy_a.vbw").string(), (work / "toy_b.vbw").string()}}, "train-toy");
  if (!o.pass) return o;

  fs::remove_all(work);
  return {true, "reconstruct, texture and train-toy outputs byte-identical across reruns"};
}

}  // namespace

int main(int argc, char** argv) {
  std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {1, {"TSDF quantization error curve on the bundled humanoid", criterion1}},
      {2, {"six-view visual hull culling at R=256", criterion2}},
      {3, {"narrow-band sparsity at R=512", criterion3}},
      {4, {"sparse vs dense convolution equivalence and adjointness", criterion4}},
      {5, {"analytic gradients vs finite differences", criterion5}},
      {6, {"mesh-to-TSDF indexed vs brute-force oracle", criterion6}},
      {7, {"marching cubes accuracy and watertightness", criterion7}},
      {8, {"toy coarse training beats the visual hull", criterion8}},
      {9, {"texture blending weights, overfit and bake resolution", criterion9}},
      {10, {"metric sanity oracles", criterion10}},
      {11, {"deterministic CLI reruns", criterion11}},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& [id, entry] : criteria) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = entry.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": "
              << entry.first << " -- " << o.note << " (" << secs << " s)" << std::endl;
    if (!o.pass) ++failures;
  }
  return failures;
}

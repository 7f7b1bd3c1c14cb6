#include "voxband/texture.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include "voxband/errors.hpp"
#include "voxband/features.hpp"
#include "voxband/parallel.hpp"
#include "voxband/synth.hpp"

namespace voxband {

SparseField compute_psdf(ActiveSetPtr band, const std::vector<CameraView>& cameras,
                         const std::vector<ImageBuffer>& depth_renders, double trunc_cm) {
  if (cameras.empty() || cameras.size() != depth_renders.size())
    throw ConfigError("psdf needs one depth render per camera");
  for (const auto& d : depth_renders)
    if (d.channels != 1) throw ConfigError("depth renders must be single-channel");
  const int V = int(cameras.size());
  SparseField psdf(band, V, trunc_cm);
  const VolumeSpec& spec = band->spec();
  parallel_for(0, band->size(), [&](std::int64_t i) {
    const Vec3 p = spec.position(band->site(i));
    auto row = psdf.row(i);
    for (int v = 0; v < V; ++v) {
      row[v] = trunc_cm;
      const Projection pr = cameras[size_t(v)].project(p);
      if (!pr.valid) continue;
      const double surf = depth_renders[size_t(v)].nearest(pr.pixel)[0];
      if (surf >= kDepthInfinity / 2) continue;  // background
      row[v] = std::clamp(surf - pr.depth, -trunc_cm, trunc_cm);
    }
  });
  return psdf;
}

AttentionBlock make_attention(int channels, int d_k, std::uint64_t seed) {
  if (channels <= 0 || d_k <= 0) throw ConfigError("attention dimensions must be positive");
  AttentionBlock b;
  b.channels = channels;
  b.d_k = d_k;
  std::mt19937_64 rng(seed);
  const double lq = std::sqrt(6.0 / channels);
  std::uniform_real_distribution<double> dist(-lq, lq);
  b.wq.resize(size_t(channels) * d_k);
  b.wk.resize(size_t(channels) * d_k);
  b.wv.resize(size_t(channels) * channels);
  for (auto& w : b.wq) w = dist(rng);
  for (auto& w : b.wk) w = dist(rng);
  for (auto& w : b.wv) w = dist(rng);
  return b;
}

namespace {

void check_views(const std::vector<SparseField>& views, const AttentionBlock& block) {
  if (views.empty()) throw ConfigError("attention needs at least one view");
  for (const auto& v : views) {
    if (v.channels() != block.channels) throw ConfigError("attention channel mismatch");
    if (!v.active().same_sites(views[0].active()))
      throw ConfigError("attention views disagree on the active set");
  }
}

}  // namespace

std::vector<SparseField> attention_reweight(const std::vector<SparseField>& views,
                                            const AttentionBlock& block) {
  check_views(views, block);
  const int V = int(views.size()), C = block.channels, D = block.d_k;
  std::vector<SparseField> out(views.size());
  for (int v = 0; v < V; ++v) out[size_t(v)] = SparseField(views[0].active_ptr(), C, 0.0);
  const double inv_sqrt_d = 1.0 / std::sqrt(double(D));

  parallel_for(0, views[0].size(), [&](std::int64_t s) {
    std::vector<double> q(size_t(V) * D, 0.0), k(size_t(V) * D, 0.0), val(size_t(V) * C, 0.0);
    for (int v = 0; v < V; ++v) {
      const auto f = views[size_t(v)].row(s);
      for (int c = 0; c < C; ++c) {
        const double fc = f[c];
        if (fc == 0.0) continue;
        for (int d = 0; d < D; ++d) {
          q[size_t(v) * D + d] += block.wq[size_t(c) * D + d] * fc;
          k[size_t(v) * D + d] += block.wk[size_t(c) * D + d] * fc;
        }
        for (int c2 = 0; c2 < C; ++c2) val[size_t(v) * C + c2] += block.wv[size_t(c) * C + c2] * fc;
      }
    }
    std::vector<double> att(size_t(V) * V);
    for (int i = 0; i < V; ++i) {
      double mx = -1e300;
      for (int j = 0; j < V; ++j) {
        double e = 0;
        for (int d = 0; d < D; ++d) e += q[size_t(i) * D + d] * k[size_t(j) * D + d];
        att[size_t(i) * V + j] = e * inv_sqrt_d;
        mx = std::max(mx, att[size_t(i) * V + j]);
      }
      double sum = 0;
      for (int j = 0; j < V; ++j) {
        att[size_t(i) * V + j] = std::exp(att[size_t(i) * V + j] - mx);
        sum += att[size_t(i) * V + j];
      }
      for (int j = 0; j < V; ++j) att[size_t(i) * V + j] /= sum;
    }
    for (int i = 0; i < V; ++i) {
      auto o = out[size_t(i)].row(s);
      for (int j = 0; j < V; ++j) {
        const double a = att[size_t(i) * V + j];
        for (int c = 0; c < C; ++c) o[c] += a * val[size_t(j) * C + c];
      }
    }
  });
  return out;
}

AttentionGradients attention_backward(const std::vector<SparseField>& views,
                                      const AttentionBlock& block,
                                      const std::vector<SparseField>& output_grads) {
  check_views(views, block);
  if (output_grads.size() != views.size())
    throw ConfigError("attention gradient view count mismatch");
  const int V = int(views.size()), C = block.channels, D = block.d_k;
  const double inv_sqrt_d = 1.0 / std::sqrt(double(D));
  AttentionGradients g;
  g.wq.assign(block.wq.size(), 0.0);
  g.wk.assign(block.wk.size(), 0.0);
  g.wv.assign(block.wv.size(), 0.0);
  g.input_grads.resize(views.size());
  for (int v = 0; v < V; ++v)
    g.input_grads[size_t(v)] = SparseField(views[0].active_ptr(), C, 0.0);

  for (std::int64_t s = 0; s < views[0].size(); ++s) {
    // recompute the forward intermediates at this site
    std::vector<double> q(size_t(V) * D, 0.0), k(size_t(V) * D, 0.0), val(size_t(V) * C, 0.0);
    for (int v = 0; v < V; ++v) {
      const auto f = views[size_t(v)].row(s);
      for (int c = 0; c < C; ++c) {
        const double fc = f[c];
        if (fc == 0.0) continue;
        for (int d = 0; d < D; ++d) {
          q[size_t(v) * D + d] += block.wq[size_t(c) * D + d] * fc;
          k[size_t(v) * D + d] += block.wk[size_t(c) * D + d] * fc;
        }
        for (int c2 = 0; c2 < C; ++c2) val[size_t(v) * C + c2] += block.wv[size_t(c) * C + c2] * fc;
      }
    }
    std::vector<double> att(size_t(V) * V);
    for (int i = 0; i < V; ++i) {
      double mx = -1e300;
      for (int j = 0; j < V; ++j) {
        double e = 0;
        for (int d = 0; d < D; ++d) e += q[size_t(i) * D + d] * k[size_t(j) * D + d];
        att[size_t(i) * V + j] = e * inv_sqrt_d;
        mx = std::max(mx, att[size_t(i) * V + j]);
      }
      double sum = 0;
      for (int j = 0; j < V; ++j) {
        att[size_t(i) * V + j] = std::exp(att[size_t(i) * V + j] - mx);
        sum += att[size_t(i) * V + j];
      }
      for (int j = 0; j < V; ++j) att[size_t(i) * V + j] /= sum;
    }

    std::vector<double> dval(size_t(V) * C, 0.0), datt(size_t(V) * V, 0.0);
    for (int i = 0; i < V; ++i) {
      const auto go = output_grads[size_t(i)].row(s);
      for (int j = 0; j < V; ++j) {
        const double a = att[size_t(i) * V + j];
        double dot = 0;
        for (int c = 0; c < C; ++c) {
          dval[size_t(j) * C + c] += a * go[c];
          dot += go[c] * val[size_t(j) * C + c];
        }
        datt[size_t(i) * V + j] = dot;
      }
    }
    std::vector<double> dq(size_t(V) * D, 0.0), dk(size_t(V) * D, 0.0);
    for (int i = 0; i < V; ++i) {
      double inner = 0;
      for (int l = 0; l < V; ++l) inner += att[size_t(i) * V + l] * datt[size_t(i) * V + l];
      for (int j = 0; j < V; ++j) {
        const double de = att[size_t(i) * V + j] * (datt[size_t(i) * V + j] - inner) * inv_sqrt_d;
        if (de == 0.0) continue;
        for (int d = 0; d < D; ++d) {
          dq[size_t(i) * D + d] += de * k[size_t(j) * D + d];
          dk[size_t(j) * D + d] += de * q[size_t(i) * D + d];
        }
      }
    }
    for (int v = 0; v < V; ++v) {
      const auto f = views[size_t(v)].row(s);
      auto gf = g.input_grads[size_t(v)].row(s);
      for (int c = 0; c < C; ++c) {
        double acc = 0;
        for (int d = 0; d < D; ++d) {
          g.wq[size_t(c) * D + d] += f[c] * dq[size_t(v) * D + d];
          g.wk[size_t(c) * D + d] += f[c] * dk[size_t(v) * D + d];
          acc += block.wq[size_t(c) * D + d] * dq[size_t(v) * D + d] +
                 block.wk[size_t(c) * D + d] * dk[size_t(v) * D + d];
        }
        for (int c2 = 0; c2 < C; ++c2) {
          g.wv[size_t(c) * C + c2] += f[c] * dval[size_t(v) * C + c2];
          acc += block.wv[size_t(c) * C + c2] * dval[size_t(v) * C + c2];
        }
        gf[c] += acc;
      }
    }
  }
  return g;
}

TextureModel make_texture_model(int feature_channels, int, std::uint64_t seed) {
  TextureModel m;
  m.feature_channels = feature_channels;
  const int C = feature_channels + 1;  // + psdf channel
  m.attention = make_attention(C, 16, seed);
  m.logit_net = make_logit_net(C, 32);
  m.logit_head.weights.assign(32, 0.0);
  init_network(m.logit_net, m.logit_head, seed + 1);
  return m;
}

namespace {

template <typename T>
void wle(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T rle(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void save_texture_model(const std::string& path, const TextureModel& model) {
  const std::string net_path = path + ".net";
  save_checkpoint(net_path, model.logit_net, model.logit_head);
  std::ifstream net_in(net_path, std::ios::binary);
  std::string net_blob((std::istreambuf_iterator<char>(net_in)),
                       std::istreambuf_iterator<char>());
  net_in.close();
  std::remove(net_path.c_str());

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write texture model: " + path);
  out.write("VBT1", 4);
  wle<std::uint32_t>(out, std::uint32_t(model.feature_channels));
  wle<std::uint32_t>(out, std::uint32_t(model.attention.channels));
  wle<std::uint32_t>(out, std::uint32_t(model.attention.d_k));
  for (double w : model.attention.wq) wle<float>(out, float(w));
  for (double w : model.attention.wk) wle<float>(out, float(w));
  for (double w : model.attention.wv) wle<float>(out, float(w));
  wle<std::uint64_t>(out, std::uint64_t(net_blob.size()));
  out.write(net_blob.data(), std::streamsize(net_blob.size()));
  if (!out) throw IoError("failed writing texture model: " + path);
}

TextureModel load_texture_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open texture model: " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "VBT1", 4) != 0) throw IoError("not a VBT1 texture model: " + path);
  TextureModel m;
  m.feature_channels = int(rle<std::uint32_t>(in));
  m.attention.channels = int(rle<std::uint32_t>(in));
  m.attention.d_k = int(rle<std::uint32_t>(in));
  m.attention.wq.resize(size_t(m.attention.channels) * m.attention.d_k);
  m.attention.wk.resize(size_t(m.attention.channels) * m.attention.d_k);
  m.attention.wv.resize(size_t(m.attention.channels) * m.attention.channels);
  for (auto& w : m.attention.wq) w = rle<float>(in);
  for (auto& w : m.attention.wk) w = rle<float>(in);
  for (auto& w : m.attention.wv) w = rle<float>(in);
  const auto blob_size = rle<std::uint64_t>(in);
  std::string blob(blob_size, '\0');
  in.read(blob.data(), std::streamsize(blob_size));
  if (!in) throw IoError("truncated texture model: " + path);
  const std::string net_path = path + ".net.tmp";
  {
    std::ofstream tmp(net_path, std::ios::binary);
    tmp.write(blob.data(), std::streamsize(blob.size()));
  }
  load_checkpoint(net_path, m.logit_net, m.logit_head);
  std::remove(net_path.c_str());
  return m;
}

namespace {

struct BlendForward {
  std::vector<SparseField> raw_features;  // per view, C+1 channels
  std::vector<SparseField> attended;
  std::vector<ForwardResult> net_fwd;
  std::vector<SparseField> logits;                 // per view, 1ch
  std::vector<std::vector<std::uint8_t>> valid;    // [view][site]
  SparseField weights;                             // V channels
};

BlendForward blend_forward(const TextureModel& model, ActiveSetPtr band,
                           const std::vector<CameraView>& cameras,
                           const std::vector<ImageBuffer>& images,
                           const std::vector<ImageBuffer>& depth_renders) {
  if (cameras.empty() || cameras.size() != images.size())
    throw ConfigError("blend weights need one image per camera");
  const int V = int(cameras.size());
  const SparseField psdf = compute_psdf(band, cameras, depth_renders);

  BlendForward fw;
  const VolumeSpec& spec = band->spec();
  for (int v = 0; v < V; ++v) {
    const FeatureMap fm = handcrafted_features(images[size_t(v)], model.feature_channels);
    const FeatureVolumeResult fv =
        build_feature_volume(band, {cameras[size_t(v)]}, {fm});
    SparseField feat(band, model.feature_channels + 1, 0.0);
    parallel_for(0, band->size(), [&](std::int64_t i) {
      auto row = feat.row(i);
      const auto src = fv.field.row(i);
      for (int c = 0; c < model.feature_channels; ++c) row[c] = src[c];
      row[model.feature_channels] = psdf.value(i, v);
    });
    fw.raw_features.push_back(std::move(feat));
    std::vector<std::uint8_t> valid(size_t(band->size()), 0);
    parallel_for(0, band->size(), [&](std::int64_t i) {
      valid[size_t(i)] = cameras[size_t(v)].project(spec.position(band->site(i))).valid ? 1 : 0;
    });
    fw.valid.push_back(std::move(valid));
  }
  fw.attended = attention_reweight(fw.raw_features, model.attention);
  for (int v = 0; v < V; ++v) {
    fw.net_fwd.push_back(network_forward(model.logit_net, fw.attended[size_t(v)]));
    fw.logits.push_back(decode_raw(fw.net_fwd.back().output, model.logit_head));
  }
  fw.weights = SparseField(band, V, 0.0);
  parallel_for(0, band->size(), [&](std::int64_t i) {
    auto w = fw.weights.row(i);
    double mx = -1e300;
    int n_valid = 0;
    for (int v = 0; v < V; ++v)
      if (fw.valid[size_t(v)][size_t(i)]) {
        mx = std::max(mx, fw.logits[size_t(v)].value(i, 0));
        ++n_valid;
      }
    if (n_valid == 0) return;  // all weights stay 0: unobserved site
    double sum = 0;
    for (int v = 0; v < V; ++v) {
      if (!fw.valid[size_t(v)][size_t(i)]) continue;
      w[v] = std::exp(fw.logits[size_t(v)].value(i, 0) - mx);
      sum += w[v];
    }
    for (int v = 0; v < V; ++v) w[v] /= sum;
  });
  return fw;
}

}  // namespace

SparseField regress_blend_weights(const TextureModel& model, ActiveSetPtr band,
                                  const std::vector<CameraView>& cameras,
                                  const std::vector<ImageBuffer>& images,
                                  const std::vector<ImageBuffer>& depth_renders) {
  return blend_forward(model, band, cameras, images, depth_renders).weights;
}

std::optional<Vec3> blend_color_at_site(std::int64_t rank, const SparseField& weights,
                                        const std::vector<CameraView>& cameras,
                                        const std::vector<ImageBuffer>& images) {
  const int V = int(cameras.size());
  const Vec3 p = weights.active().spec().position(weights.active().site(rank));
  Vec3 color = Vec3::Zero();
  double wsum = 0;
  for (int v = 0; v < V; ++v) {
    const double w = weights.value(rank, v);
    if (w <= 0) continue;
    const Projection pr = cameras[size_t(v)].project(p);
    if (!pr.valid) continue;
    const auto rgb = images[size_t(v)].bilinear(pr.pixel);
    for (int c = 0; c < 3; ++c) color[c] += w * rgb[c];
    wsum += w;
  }
  if (wsum <= 0) return std::nullopt;
  return Vec3(color / wsum);
}

std::optional<Vec3> blend_color(const Vec3& point, const SparseField& weights,
                                const std::vector<CameraView>& cameras,
                                const std::vector<ImageBuffer>& images) {
  const int V = int(cameras.size());
  if (weights.channels() != V) throw ConfigError("weight volume view count mismatch");
  const std::vector<double> w = weights.trilinear(point);
  Vec3 color = Vec3::Zero();
  double wsum = 0;
  for (int v = 0; v < V; ++v) {
    if (w[size_t(v)] <= 0) continue;
    const Projection pr = cameras[size_t(v)].project(point);
    if (!pr.valid) continue;
    const auto rgb = images[size_t(v)].bilinear(pr.pixel);
    for (int c = 0; c < 3; ++c) color[c] += w[size_t(v)] * rgb[c];
    wsum += w[size_t(v)];
  }
  if (wsum <= 0) return std::nullopt;
  return Vec3(color / wsum);
}

SparseField gt_color_volume(const TriangleMesh& mesh, ActiveSetPtr band) {
  if (mesh.colors.size() != mesh.vertices.size())
    throw ConfigError("ground-truth colors need a colored mesh");
  const BucketGrid grid(mesh);
  SparseField colors(band, 3, 0.0);
  const VolumeSpec& spec = band->spec();
  parallel_for(0, band->size(), [&](std::int64_t i) {
    const ClosestPoint cp = grid.closest(spec.position(band->site(i)));
    const auto& t = mesh.triangles[cp.triangle];
    const Vec3 c = cp.barycentric.x() * mesh.colors[t[0]] +
                   cp.barycentric.y() * mesh.colors[t[1]] +
                   cp.barycentric.z() * mesh.colors[t[2]];
    auto row = colors.row(i);
    for (int k = 0; k < 3; ++k) row[k] = c[k];
  });
  return colors;
}

double color_loss(const SparseField& weights, const std::vector<CameraView>& cameras,
                  const std::vector<ImageBuffer>& images, const SparseField& gt_colors) {
  if (!weights.active().same_sites(gt_colors.active()))
    throw ConfigError("color loss band mismatch");
  double loss = 0;
  for (std::int64_t i = 0; i < weights.size(); ++i) {
    const auto pred = blend_color_at_site(i, weights, cameras, images);
    if (!pred) continue;
    for (int c = 0; c < 3; ++c) loss += std::abs((*pred)[c] - gt_colors.value(i, c));
  }
  return loss;
}

TextureTrainReport train_texture(TextureModel& model, ActiveSetPtr band,
                                 const std::vector<CameraView>& cameras,
                                 const std::vector<ImageBuffer>& images,
                                 const std::vector<ImageBuffer>& depth_renders,
                                 const SparseField& gt_colors, int steps, double lr) {
  const int V = int(cameras.size());
  TextureTrainReport report;

  // per-site view colors are fixed: sample once
  const VolumeSpec& spec = band->spec();
  std::vector<SparseField> view_colors;
  for (int v = 0; v < V; ++v) {
    SparseField c(band, 3, 0.0);
    parallel_for(0, band->size(), [&](std::int64_t i) {
      const Projection pr = cameras[size_t(v)].project(spec.position(band->site(i)));
      if (!pr.valid) return;
      const auto rgb = images[size_t(v)].bilinear(pr.pixel);
      auto row = c.row(i);
      for (int k = 0; k < 3; ++k) row[k] = rgb[k];
    });
    view_colors.push_back(std::move(c));
  }

  {
    // uniform-weight baseline
    BlendForward fw = blend_forward(model, band, cameras, images, depth_renders);
    SparseField uniform(band, V, 0.0);
    for (std::int64_t i = 0; i < band->size(); ++i) {
      int n = 0;
      for (int v = 0; v < V; ++v)
        if (fw.valid[size_t(v)][size_t(i)]) ++n;
      if (n == 0) continue;
      for (int v = 0; v < V; ++v)
        if (fw.valid[size_t(v)][size_t(i)]) uniform.value(i, v) = 1.0 / n;
    }
    report.zero_model_loss = color_loss(uniform, cameras, images, gt_colors);
  }

  AdamState state;
  for (int step = 0; step < steps; ++step) {
    BlendForward fw = blend_forward(model, band, cameras, images, depth_renders);
    const double loss = color_loss(fw.weights, cameras, images, gt_colors);
    report.losses.push_back(loss);
    if (step == 0) report.first_loss = loss;
    report.final_loss = loss;

    // dLoss/dlogit per view via the cross-view softmax
    std::vector<SparseField> logit_grads;
    logit_grads.resize(size_t(V));
    for (int v = 0; v < V; ++v) logit_grads[size_t(v)] = SparseField(band, 1, 0.0);
    for (std::int64_t i = 0; i < band->size(); ++i) {
      const auto w = fw.weights.row(i);
      double any = 0;
      for (int v = 0; v < V; ++v) any += w[v];
      if (any <= 0) continue;
      Vec3 pred = Vec3::Zero();
      for (int v = 0; v < V; ++v)
        for (int c = 0; c < 3; ++c) pred[c] += w[v] * view_colors[size_t(v)].value(i, c);
      Vec3 dpred;
      for (int c = 0; c < 3; ++c) {
        const double d = pred[c] - gt_colors.value(i, c);
        dpred[c] = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
      }
      std::vector<double> dw(size_t(V), 0.0);
      double inner = 0;
      for (int v = 0; v < V; ++v) {
        for (int c = 0; c < 3; ++c) dw[size_t(v)] += dpred[c] * view_colors[size_t(v)].value(i, c);
        inner += w[v] * dw[size_t(v)];
      }
      for (int v = 0; v < V; ++v)
        logit_grads[size_t(v)].value(i, 0) = w[v] * (dw[size_t(v)] - inner);
    }

    // shared logit net: gradients accumulate across views
    std::vector<double> net_grad;
    std::vector<SparseField> attended_grads;
    attended_grads.resize(size_t(V));
    for (int v = 0; v < V; ++v) {
      const NetworkGradients g = network_backward(model.logit_net, model.logit_head,
                                                  fw.net_fwd[size_t(v)], logit_grads[size_t(v)]);
      const std::vector<double> flat = g.flatten(model.logit_net, model.logit_head);
      if (net_grad.empty())
        net_grad = flat;
      else
        for (size_t k = 0; k < flat.size(); ++k) net_grad[k] += flat[k];
      attended_grads[size_t(v)] = g.input_grad;
    }
    const AttentionGradients ag =
        attention_backward(fw.raw_features, model.attention, attended_grads);

    std::vector<double> params = model.attention.wq;
    params.insert(params.end(), model.attention.wk.begin(), model.attention.wk.end());
    params.insert(params.end(), model.attention.wv.begin(), model.attention.wv.end());
    const std::vector<double> net_params = flatten_params(model.logit_net, model.logit_head);
    params.insert(params.end(), net_params.begin(), net_params.end());

    std::vector<double> grads = ag.wq;
    grads.insert(grads.end(), ag.wk.begin(), ag.wk.end());
    grads.insert(grads.end(), ag.wv.begin(), ag.wv.end());
    grads.insert(grads.end(), net_grad.begin(), net_grad.end());

    adam_step(params, grads, state, lr);

    size_t pos = 0;
    std::copy(params.begin(), params.begin() + model.attention.wq.size(),
              model.attention.wq.begin());
    pos += model.attention.wq.size();
    std::copy(params.begin() + pos, params.begin() + pos + model.attention.wk.size(),
              model.attention.wk.begin());
    pos += model.attention.wk.size();
    std::copy(params.begin() + pos, params.begin() + pos + model.attention.wv.size(),
              model.attention.wv.begin());
    pos += model.attention.wv.size();
    std::vector<double> new_net(params.begin() + pos, params.end());
    unflatten_params(new_net, model.logit_net, model.logit_head);
  }
  return report;
}

}  // namespace voxband

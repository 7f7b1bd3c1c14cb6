#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voxband/camera.hpp"
#include "voxband/image.hpp"
#include "voxband/network.hpp"
#include "voxband/train.hpp"

namespace voxband {

// Per-view projective signed distance: surface depth minus site depth along
// the view ray, clamped to +/- trunc. Invalid projections and background read
// +trunc (fully in front of nothing).
SparseField compute_psdf(ActiveSetPtr band, const std::vector<CameraView>& cameras,
                         const std::vector<ImageBuffer>& depth_renders, double trunc_cm = 2.0);

// Single-head scaled dot-product attention across the view axis, shared
// query/key/value maps (no bias), applied independently per site.
struct AttentionBlock {
  int channels = 0;
  int d_k = 16;
  std::vector<double> wq, wk;  // channels x d_k
  std::vector<double> wv;      // channels x channels
};

AttentionBlock make_attention(int channels, int d_k, std::uint64_t seed);

std::vector<SparseField> attention_reweight(const std::vector<SparseField>& views,
                                            const AttentionBlock& block);

struct AttentionGradients {
  std::vector<double> wq, wk, wv;
  std::vector<SparseField> input_grads;
};

AttentionGradients attention_backward(const std::vector<SparseField>& views,
                                      const AttentionBlock& block,
                                      const std::vector<SparseField>& output_grads);

// Blend-weight regressor: per-view handcrafted texture features + PSDF channel,
// attention across views, a shared logit net per view, softmax across views.
struct TextureModel {
  int feature_channels = 32;
  AttentionBlock attention;
  NetworkGraph logit_net;
  DecodeHead logit_head;
};

TextureModel make_texture_model(int feature_channels, int views_hint, std::uint64_t seed);

void save_texture_model(const std::string& path, const TextureModel& model);
TextureModel load_texture_model(const std::string& path);

// V-channel convex weights per band site (softmax across views, sums to 1).
SparseField regress_blend_weights(const TextureModel& model, ActiveSetPtr band,
                                  const std::vector<CameraView>& cameras,
                                  const std::vector<ImageBuffer>& images,
                                  const std::vector<ImageBuffer>& depth_renders);

// Weighted average of the view colors at an arbitrary point inside the band
// cube; weights are trilinearly sampled then renormalized over the views with
// a valid projection. nullopt when no view sees the point.
std::optional<Vec3> blend_color(const Vec3& point, const SparseField& weights,
                                const std::vector<CameraView>& cameras,
                                const std::vector<ImageBuffer>& images);

// Same blend evaluated exactly at a band site rank.
std::optional<Vec3> blend_color_at_site(std::int64_t rank, const SparseField& weights,
                                        const std::vector<CameraView>& cameras,
                                        const std::vector<ImageBuffer>& images);

// Nearest-surface-point color per band site (barycentric vertex colors).
SparseField gt_color_volume(const TriangleMesh& mesh, ActiveSetPtr band);

// Sum over band sites of the L1 gap between the blended and ground-truth
// color, canonical order; sites no view observes are skipped.
double color_loss(const SparseField& weights, const std::vector<CameraView>& cameras,
                  const std::vector<ImageBuffer>& images, const SparseField& gt_colors);

struct TextureTrainReport {
  double zero_model_loss = 0.0;  // uniform 1/V weights
  double first_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> losses;
};

// Adam loop over attention + logit net + head against gt colors.
TextureTrainReport train_texture(TextureModel& model, ActiveSetPtr band,
                                 const std::vector<CameraView>& cameras,
                                 const std::vector<ImageBuffer>& images,
                                 const std::vector<ImageBuffer>& depth_renders,
                                 const SparseField& gt_colors, int steps, double lr = 1e-4);

}  // namespace voxband

#pragma once

#include <span>
#include <string>
#include <vector>

#include "voxband/active_set.hpp"

namespace voxband {

// Per-site channel vectors aligned with ActiveSet ranks. Sites absent from the
// active set carry the declared fill value on every channel (TSDF: +truncation,
// features: 0, blend logits: -1e9).
class SparseField {
 public:
  SparseField() = default;
  SparseField(ActiveSetPtr active, int channels, double fill = 0.0);

  const ActiveSet& active() const { return *active_; }
  const ActiveSetPtr& active_ptr() const { return active_; }
  int channels() const { return channels_; }
  double fill() const { return fill_; }
  std::int64_t size() const { return active_ ? active_->size() : 0; }

  std::span<double> row(std::int64_t rank) {
    return {values_.data() + rank * channels_, size_t(channels_)};
  }
  std::span<const double> row(std::int64_t rank) const {
    return {values_.data() + rank * channels_, size_t(channels_)};
  }
  double& value(std::int64_t rank, int c) { return values_[rank * channels_ + c]; }
  double value(std::int64_t rank, int c) const { return values_[rank * channels_ + c]; }

  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }

  // Trilinear blend of the 8 surrounding grid vertices; inactive vertices
  // contribute the fill value. Throws when the point leaves the cube.
  std::vector<double> trilinear(const Vec3& point) const;

  // Per-view channel concatenation on a shared active set.
  static SparseField concat(const SparseField& a, const SparseField& b);

 private:
  ActiveSetPtr active_;
  int channels_ = 0;
  double fill_ = 0.0;
  std::vector<double> values_;
};

// Subset of a 1-channel TSDF field with |value| < threshold.
ActiveSet narrow_band(const SparseField& tsdf, double threshold_cm);

// Trilinear resampling of a coarse field onto a target set at doubled resolution.
SparseField upsample_to(const SparseField& field, ActiveSetPtr target);

// "SVF1" binary container, little-endian float32 payload in canonical order.
void save_svf(const std::string& path, const SparseField& field);
SparseField load_svf(const std::string& path, double fill = 0.0);

}  // namespace voxband

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "voxband/bucket_grid.hpp"
#include "voxband/sparse_field.hpp"

namespace voxband {

// 1-channel signed distance clamped to +/- truncation, positive outside.
struct TsdfVolume {
  SparseField field;
  double truncation = 5.0;  // cm

  const ActiveSet& active() const { return field.active(); }
  double value(std::int64_t rank) const { return field.value(rank, 0); }
};

// Active set covering the mesh surface to within `radius_cm` (triangle AABB
// dilation; a superset of the true band, cheap to build).
ActiveSet mesh_band_active_set(const TriangleMesh& mesh, const VolumeSpec& spec,
                               double radius_cm);

// Ground-truth TSDF: per site, sign(parity) * min(distance, truncation).
// The bucket grid accelerates queries but is output-identical to brute force.
// Throws ValidationError listing offending edges when the mesh is too open
// for parity signing (more than 2% non-manifold edges).
TsdfVolume mesh_to_tsdf(const TriangleMesh& mesh, ActiveSetPtr active, double truncation_cm);

struct QuantizationResult {
  double mean_abs_error_cm = 0;
  int effective_samples = 0;
  int skipped_samples = 0;
};

// Mean |trilinear TSDF| over deterministic area-weighted surface samples.
// Samples falling outside the cube are skipped; > 1% skipped is a coverage error.
QuantizationResult quantization_error(const TriangleMesh& mesh, const TsdfVolume& tsdf,
                                      int n_samples, std::uint64_t seed = 42);

}  // namespace voxband

#include "voxband/rulebook.hpp"

#include "voxband/errors.hpp"

namespace voxband {

Rulebook build_submanifold_rulebook(ActiveSetPtr input) {
  if (!input || input->empty()) throw ConfigError("rulebook needs a non-empty active set");
  Rulebook rb;
  rb.variant = ConvVariant::Submanifold;
  rb.input = input;
  rb.output = input;
  for (int k = 0; k < kKernelOffsets; ++k) {
    const Vec3i d = kernel_offset(k);
    auto& list = rb.pairs[k];
    if (k == kCenterOffset) {
      list.reserve(size_t(input->size()));
      for (std::int64_t i = 0; i < input->size(); ++i) list.emplace_back(i, i);
      continue;
    }
    for (std::int64_t i = 0; i < input->size(); ++i) {
      const Vec3i s = input->site(i) + d;
      const std::int64_t in_rank = input->rank_of(s);
      if (in_rank >= 0) list.emplace_back(in_rank, i);
    }
  }
  return rb;
}

Rulebook build_strided_rulebook(ActiveSetPtr input) {
  if (!input || input->empty()) throw ConfigError("rulebook needs a non-empty active set");
  const VolumeSpec& fine = input->spec();
  if (fine.resolution % 2 != 0)
    throw ConfigError("stride-2 needs an even input resolution");
  VolumeSpec coarse = fine;
  coarse.resolution = fine.resolution / 2;

  // output sites: floor((s - delta - 1) / 2) over the covering windows
  std::vector<Vec3i> out_sites;
  for (const Vec3i& s : input->sites())
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const int cx = s.x() - dx - 1, cy = s.y() - dy - 1, cz = s.z() - dz - 1;
          if (cx < 0 || cy < 0 || cz < 0 || cx % 2 || cy % 2 || cz % 2) continue;
          const Vec3i o(cx / 2, cy / 2, cz / 2);
          if (o.maxCoeff() < coarse.resolution) out_sites.push_back(o);
        }
  auto output = std::make_shared<ActiveSet>(coarse, std::move(out_sites));

  Rulebook rb;
  rb.variant = ConvVariant::Strided;
  rb.input = input;
  rb.output = output;
  for (int k = 0; k < kKernelOffsets; ++k) {
    const Vec3i d = kernel_offset(k);
    auto& list = rb.pairs[k];
    for (std::int64_t oi = 0; oi < output->size(); ++oi) {
      const Vec3i o = output->site(oi);
      const Vec3i s = 2 * o + Vec3i(1, 1, 1) + d;
      const std::int64_t in_rank = input->rank_of(s);
      if (in_rank >= 0) list.emplace_back(in_rank, oi);
    }
  }
  return rb;
}

Rulebook transpose_rulebook(const Rulebook& strided) {
  if (strided.variant != ConvVariant::Strided || !strided.output)
    throw ConfigError("transposed convolution needs a cached strided rulebook");
  Rulebook rb;
  rb.variant = ConvVariant::Transposed;
  rb.input = strided.output;
  rb.output = strided.input;
  for (int k = 0; k < kKernelOffsets; ++k) {
    rb.pairs[k].reserve(strided.pairs[k].size());
    for (const auto& [fine, coarse] : strided.pairs[k]) rb.pairs[k].emplace_back(coarse, fine);
  }
  return rb;
}

}  // namespace voxband

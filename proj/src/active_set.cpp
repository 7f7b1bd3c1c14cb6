#include "voxband/active_set.hpp"

#include <algorithm>

#include "voxband/errors.hpp"

namespace voxband {

ActiveSet::ActiveSet(VolumeSpec spec, std::vector<Vec3i> sites) : spec_(spec) {
  for (const auto& s : sites)
    if (s.x() < 0 || s.y() < 0 || s.z() < 0 || s.x() >= spec.resolution ||
        s.y() >= spec.resolution || s.z() >= spec.resolution)
      throw ValidationError("active site outside the volume grid");
  std::sort(sites.begin(), sites.end(), [](const Vec3i& a, const Vec3i& b) {
    return pack_index(a.x(), a.y(), a.z()) < pack_index(b.x(), b.y(), b.z());
  });
  sites.erase(std::unique(sites.begin(), sites.end(),
                          [](const Vec3i& a, const Vec3i& b) { return a == b; }),
              sites.end());
  sites_ = std::move(sites);
  index_.reserve(sites_.size() * 2);
  for (size_t i = 0; i < sites_.size(); ++i)
    index_.emplace(pack_index(sites_[i].x(), sites_[i].y(), sites_[i].z()), std::int64_t(i));
}

bool ActiveSet::same_sites(const ActiveSet& other) const {
  return sites_.size() == other.sites_.size() &&
         std::equal(sites_.begin(), sites_.end(), other.sites_.begin());
}

}  // namespace voxband

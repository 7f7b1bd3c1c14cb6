#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "voxband/geometry.hpp"

namespace voxband {

// Hashed set of active grid vertices with dense ranks assigned in canonical
// lexicographic (w,h,d) order. Immutable once built.
class ActiveSet {
 public:
  ActiveSet() = default;
  // Sites may arrive in any order and may contain duplicates.
  ActiveSet(VolumeSpec spec, std::vector<Vec3i> sites);

  const VolumeSpec& spec() const { return spec_; }
  std::int64_t size() const { return std::int64_t(sites_.size()); }
  bool empty() const { return sites_.empty(); }

  // Sites in canonical order; index into this vector is the rank.
  const std::vector<Vec3i>& sites() const { return sites_; }
  Vec3i site(std::int64_t rank) const { return sites_[size_t(rank)]; }

  // Rank of (w,h,d), or -1 when inactive.
  std::int64_t rank_of(int w, int h, int d) const {
    const auto it = index_.find(pack_index(w, h, d));
    return it == index_.end() ? -1 : it->second;
  }
  std::int64_t rank_of(const Vec3i& s) const { return rank_of(s.x(), s.y(), s.z()); }
  bool contains(const Vec3i& s) const { return rank_of(s) >= 0; }

  bool same_sites(const ActiveSet& other) const;

 private:
  VolumeSpec spec_;
  std::vector<Vec3i> sites_;
  std::unordered_map<std::uint64_t, std::int64_t> index_;
};

using ActiveSetPtr = std::shared_ptr<const ActiveSet>;

}  // namespace voxband

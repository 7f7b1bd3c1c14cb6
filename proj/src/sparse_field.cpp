#include "voxband/sparse_field.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "voxband/errors.hpp"
#include "voxband/parallel.hpp"

namespace voxband {

SparseField::SparseField(ActiveSetPtr active, int channels, double fill)
    : active_(std::move(active)), channels_(channels), fill_(fill) {
  if (channels_ <= 0) throw ConfigError("field channel count must be positive");
  values_.assign(size_t(active_->size()) * channels_, fill_);
}

std::vector<double> SparseField::trilinear(const Vec3& point) const {
  const VolumeSpec& spec = active_->spec();
  if (!spec.contains(point)) throw NumericError("trilinear sample outside the volume cube");
  const Vec3 g = spec.grid_coord(point);
  const int R = spec.resolution;
  int i0[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    i0[a] = int(std::floor(g[a]));
    f[a] = g[a] - i0[a];
  }
  std::vector<double> out(channels_, 0.0);
  for (int corner = 0; corner < 8; ++corner) {
    const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
    const double w = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) * (dz ? f[2] : 1 - f[2]);
    if (w == 0.0) continue;
    const Vec3i s(i0[0] + dx, i0[1] + dy, i0[2] + dz);
    // grid vertices outside the lattice are inactive and read the fill value
    const bool in = s.minCoeff() >= 0 && s.maxCoeff() < R;
    const std::int64_t rank = in ? active_->rank_of(s) : -1;
    if (rank >= 0) {
      const auto r = row(rank);
      for (int c = 0; c < channels_; ++c) out[c] += w * r[c];
    } else {
      for (int c = 0; c < channels_; ++c) out[c] += w * fill_;
    }
  }
  return out;
}

SparseField SparseField::concat(const SparseField& a, const SparseField& b) {
  if (!a.active().same_sites(b.active()))
    throw ConfigError("cannot concat fields over different active sets");
  SparseField out(a.active_ptr(), a.channels() + b.channels(), a.fill());
  parallel_for(0, a.size(), [&](std::int64_t i) {
    auto dst = out.row(i);
    const auto ra = a.row(i);
    const auto rb = b.row(i);
    std::copy(ra.begin(), ra.end(), dst.begin());
    std::copy(rb.begin(), rb.end(), dst.begin() + a.channels());
  });
  return out;
}

ActiveSet narrow_band(const SparseField& tsdf, double threshold_cm) {
  if (tsdf.channels() != 1) throw ConfigError("narrow_band expects a 1-channel TSDF field");
  if (threshold_cm <= 0) throw ConfigError("narrow band threshold must be positive");
  std::vector<Vec3i> kept;
  for (std::int64_t i = 0; i < tsdf.size(); ++i)
    if (std::abs(tsdf.value(i, 0)) < threshold_cm) kept.push_back(tsdf.active().site(i));
  return ActiveSet(tsdf.active().spec(), std::move(kept));
}

SparseField upsample_to(const SparseField& field, ActiveSetPtr target) {
  const VolumeSpec& coarse = field.active().spec();
  const VolumeSpec& fine = target->spec();
  if (!coarse.same_geometry(fine) || fine.resolution != 2 * coarse.resolution)
    throw ConfigError("upsample target must share origin/edge at doubled resolution");
  SparseField out(target, field.channels(), field.fill());
  parallel_for(0, target->size(), [&](std::int64_t i) {
    const auto v = field.trilinear(fine.position(target->site(i)));
    std::copy(v.begin(), v.end(), out.row(i).begin());
  });
  return out;
}

namespace {

template <typename T>
void write_le(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void save_svf(const std::string& path, const SparseField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write field: " + path);
  out.write("SVF1", 4);
  const VolumeSpec& spec = field.active().spec();
  write_le<std::uint32_t>(out, std::uint32_t(spec.resolution));
  for (int a = 0; a < 3; ++a) write_le<float>(out, float(spec.origin[a]));
  write_le<float>(out, float(spec.edge));
  write_le<std::uint32_t>(out, std::uint32_t(field.channels()));
  write_le<std::uint64_t>(out, std::uint64_t(field.size()));
  for (const auto& s : field.active().sites())
    for (int a = 0; a < 3; ++a) write_le<std::int32_t>(out, s[a]);
  for (std::int64_t i = 0; i < field.size(); ++i)
    for (int c = 0; c < field.channels(); ++c) write_le<float>(out, float(field.value(i, c)));
}

SparseField load_svf(const std::string& path, double fill) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open field: " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "SVF1", 4) != 0) throw IoError("not an SVF1 container: " + path);
  VolumeSpec spec;
  spec.resolution = int(read_le<std::uint32_t>(in));
  for (int a = 0; a < 3; ++a) spec.origin[a] = read_le<float>(in);
  spec.edge = read_le<float>(in);
  const int channels = int(read_le<std::uint32_t>(in));
  const std::int64_t n = std::int64_t(read_le<std::uint64_t>(in));
  std::vector<Vec3i> sites(n);
  for (auto& s : sites)
    for (int a = 0; a < 3; ++a) s[a] = read_le<std::int32_t>(in);
  SparseField field(std::make_shared<ActiveSet>(spec, std::move(sites)), channels, fill);
  for (std::int64_t i = 0; i < field.size(); ++i)
    for (int c = 0; c < channels; ++c) field.value(i, c) = read_le<float>(in);
  if (!in) throw IoError("truncated SVF1 container: " + path);
  return field;
}

}  // namespace voxband

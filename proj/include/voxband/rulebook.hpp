#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "voxband/active_set.hpp"

namespace voxband {

enum class ConvVariant { Submanifold, Strided, Transposed };

// Kernel offsets run in lexicographic order: index = (dx+1)*9 + (dy+1)*3 + (dz+1).
inline constexpr int kKernelOffsets = 27;
inline constexpr int kCenterOffset = 13;
inline Vec3i kernel_offset(int idx) {
  return Vec3i(idx / 9 - 1, (idx / 3) % 3 - 1, idx % 3 - 1);
}

// Gather/scatter pairs (input rank, output rank) per kernel offset.
struct Rulebook {
  ConvVariant variant = ConvVariant::Submanifold;
  ActiveSetPtr input;
  ActiveSetPtr output;
  std::array<std::vector<std::pair<std::int64_t, std::int64_t>>, kKernelOffsets> pairs;
};

// Submanifold: input set reused as output; pair (i+delta, i) whenever both active.
Rulebook build_submanifold_rulebook(ActiveSetPtr input);

// Stride-2 downsampling. Output lives at half resolution (same cube); site o is
// active when any input in the 3x3x3 window centered at 2o+(1,1,1) is active.
Rulebook build_strided_rulebook(ActiveSetPtr input);

// Exact adjoint of a recorded strided rulebook: coarse input, original fine output.
Rulebook transpose_rulebook(const Rulebook& strided);

}  // namespace voxband

#pragma once

#include <cstdint>
#include <vector>

#include "voxband/rulebook.hpp"
#include "voxband/sparse_field.hpp"

namespace voxband {

// One sparse 3D convolution layer. Weights are stored [offset][in][out];
// kernel 1 layers keep only the center offset (in*out weights).
struct ConvLayer {
  ConvVariant variant = ConvVariant::Submanifold;
  int kernel = 3;  // 3 or 1 (1 is submanifold only)
  int in_channels = 0;
  int out_channels = 0;
  bool relu = false;
  bool affine = false;
  std::vector<double> weights;
  std::vector<double> bias;   // out_channels
  std::vector<double> scale;  // affine only, out_channels
  std::vector<double> shift;  // affine only, out_channels

  int offsets() const { return kernel == 1 ? 1 : kKernelOffsets; }
  std::size_t weight_count() const {
    return std::size_t(offsets()) * in_channels * out_channels;
  }
  double w(int offset, int ci, int co) const {
    return weights[(std::size_t(offset) * in_channels + ci) * out_channels + co];
  }
};

ConvLayer make_conv(ConvVariant variant, int in_channels, int out_channels, bool relu,
                    int kernel = 3);

// out[o] = act(affine(sum_delta W_delta . in[gather(delta, o)] + b)); offsets
// accumulate in lexicographic order, inactive neighbors contribute zero.
// `preact_out`, when given, receives the raw convolution sum for backward.
SparseField conv_forward(const SparseField& input, const ConvLayer& layer,
                         const Rulebook& rulebook, SparseField* preact_out = nullptr);

// Reverse-mode step for one layer. `output_grad` is the gradient at the layer
// output (post activation); returns the input gradient and accumulates weight
// gradients into the given buffers (sized like weights/bias/scale/shift).
SparseField conv_backward(const SparseField& input, const ConvLayer& layer,
                          const Rulebook& rulebook, const SparseField& preact,
                          const SparseField& output_grad, std::vector<double>& weight_grad,
                          std::vector<double>& bias_grad, std::vector<double>& scale_grad,
                          std::vector<double>& shift_grad);

}  // namespace voxband

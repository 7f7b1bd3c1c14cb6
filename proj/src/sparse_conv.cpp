#include "voxband/sparse_conv.hpp"

#include <algorithm>
#include <cmath>

#include "voxband/errors.hpp"
#include "voxband/parallel.hpp"

namespace voxband {

ConvLayer make_conv(ConvVariant variant, int in_channels, int out_channels, bool relu,
                    int kernel) {
  if (in_channels <= 0 || out_channels <= 0) throw ConfigError("conv channels must be positive");
  if (kernel != 1 && kernel != 3) throw ConfigError("conv kernel must be 1 or 3");
  if (kernel == 1 && variant != ConvVariant::Submanifold)
    throw ConfigError("kernel-1 convolutions are submanifold only");
  ConvLayer l;
  l.variant = variant;
  l.kernel = kernel;
  l.in_channels = in_channels;
  l.out_channels = out_channels;
  l.relu = relu;
  l.weights.assign(l.weight_count(), 0.0);
  l.bias.assign(out_channels, 0.0);
  return l;
}

namespace {

void check_layer(const SparseField& input, const ConvLayer& layer, const Rulebook& rulebook) {
  if (input.channels() != layer.in_channels)
    throw ConfigError("conv input channel mismatch");
  if (layer.weights.size() != layer.weight_count() ||
      layer.bias.size() != std::size_t(layer.out_channels))
    throw ConfigError("conv weight buffer shape mismatch");
  if (layer.affine && (layer.scale.size() != std::size_t(layer.out_channels) ||
                       layer.shift.size() != std::size_t(layer.out_channels)))
    throw ConfigError("conv affine buffer shape mismatch");
  if (layer.kernel == 3) {
    if (rulebook.variant != layer.variant) throw ConfigError("rulebook variant mismatch");
    if (!rulebook.input || !rulebook.input->same_sites(input.active()))
      throw ConfigError("rulebook does not match the input active set");
  }
}

}  // namespace

SparseField conv_forward(const SparseField& input, const ConvLayer& layer,
                         const Rulebook& rulebook, SparseField* preact_out) {
  check_layer(input, layer, rulebook);
  const ActiveSetPtr out_set =
      layer.kernel == 1 ? input.active_ptr() : rulebook.output;
  SparseField sum(out_set, layer.out_channels, 0.0);
  const int Ci = layer.in_channels, Co = layer.out_channels;

  parallel_for(0, sum.size(), [&](std::int64_t o) {
    auto row = sum.row(o);
    for (int co = 0; co < Co; ++co) row[co] = layer.bias[co];
  });
  if (layer.kernel == 1) {
    parallel_for(0, sum.size(), [&](std::int64_t o) {
      auto out = sum.row(o);
      const auto in = input.row(o);
      for (int ci = 0; ci < Ci; ++ci)
        for (int co = 0; co < Co; ++co) out[co] += layer.w(0, ci, co) * in[ci];
    });
  } else {
    for (int k = 0; k < kKernelOffsets; ++k) {
      const auto& pairs = rulebook.pairs[k];
      // within one offset every output rank appears at most once: safe to scatter
      parallel_for(0, std::int64_t(pairs.size()), [&](std::int64_t pi) {
        const auto [i, o] = pairs[size_t(pi)];
        auto out = sum.row(o);
        const auto in = input.row(i);
        for (int ci = 0; ci < Ci; ++ci) {
          const double v = in[ci];
          if (v == 0.0) continue;
          for (int co = 0; co < Co; ++co) out[co] += layer.w(k, ci, co) * v;
        }
      });
    }
  }
  if (preact_out) *preact_out = sum;
  if (layer.affine || layer.relu) {
    parallel_for(0, sum.size(), [&](std::int64_t o) {
      auto row = sum.row(o);
      for (int co = 0; co < Co; ++co) {
        double v = row[co];
        if (layer.affine) v = layer.scale[co] * v + layer.shift[co];
        if (layer.relu) v = std::max(0.0, v);
        row[co] = v;
      }
    });
  }
  return sum;
}

SparseField conv_backward(const SparseField& input, const ConvLayer& layer,
                          const Rulebook& rulebook, const SparseField& preact,
                          const SparseField& output_grad, std::vector<double>& weight_grad,
                          std::vector<double>& bias_grad, std::vector<double>& scale_grad,
                          std::vector<double>& shift_grad) {
  check_layer(input, layer, rulebook);
  const int Ci = layer.in_channels, Co = layer.out_channels;
  if (weight_grad.size() != layer.weights.size() || bias_grad.size() != layer.bias.size())
    throw ConfigError("conv gradient buffer shape mismatch");

  // gradient at the pre-affine convolution sum
  SparseField gsum(output_grad.active_ptr(), Co, 0.0);
  parallel_for(0, gsum.size(), [&](std::int64_t o) {
    const auto g = output_grad.row(o);
    const auto s = preact.row(o);
    auto out = gsum.row(o);
    for (int co = 0; co < Co; ++co) {
      double a = s[co];
      if (layer.affine) a = layer.scale[co] * a + layer.shift[co];
      const double gv = layer.relu && a <= 0.0 ? 0.0 : g[co];
      out[co] = layer.affine ? gv * layer.scale[co] : gv;
    }
  });
  if (layer.affine) {
    for (std::int64_t o = 0; o < gsum.size(); ++o) {
      const auto g = output_grad.row(o);
      const auto s = preact.row(o);
      for (int co = 0; co < Co; ++co) {
        const double a = layer.scale[co] * s[co] + layer.shift[co];
        const double gv = layer.relu && a <= 0.0 ? 0.0 : g[co];
        scale_grad[co] += gv * s[co];
        shift_grad[co] += gv;
      }
    }
  }
  for (std::int64_t o = 0; o < gsum.size(); ++o) {
    const auto g = gsum.row(o);
    for (int co = 0; co < Co; ++co) bias_grad[co] += g[co];
  }

  SparseField input_grad(input.active_ptr(), Ci, 0.0);
  if (layer.kernel == 1) {
    for (std::int64_t o = 0; o < gsum.size(); ++o) {
      const auto g = gsum.row(o);
      const auto in = input.row(o);
      auto gin = input_grad.row(o);
      for (int ci = 0; ci < Ci; ++ci)
        for (int co = 0; co < Co; ++co) {
          weight_grad[(std::size_t(ci)) * Co + co] += in[ci] * g[co];
          gin[ci] += layer.w(0, ci, co) * g[co];
        }
    }
  } else {
    for (int k = 0; k < kKernelOffsets; ++k) {
      for (const auto& [i, o] : rulebook.pairs[k]) {
        const auto g = gsum.row(o);
        const auto in = input.row(i);
        auto gin = input_grad.row(i);
        for (int ci = 0; ci < Ci; ++ci) {
          double acc = 0;
          for (int co = 0; co < Co; ++co) {
            weight_grad[(std::size_t(k) * Ci + ci) * Co + co] += in[ci] * g[co];
            acc += layer.w(k, ci, co) * g[co];
          }
          gin[ci] += acc;
        }
      }
    }
  }
  return input_grad;
}

}  // namespace voxband

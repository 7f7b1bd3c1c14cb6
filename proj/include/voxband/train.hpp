#pragma once

#include <vector>

#include "voxband/network.hpp"

namespace voxband {

// L1 distance between biased raw predictions and the ground truth TSDF,
// summed over the region in canonical site order.
double stage_loss(const SparseField& raw_pred, const TsdfVolume& gt, const ActiveSet& region,
                  double bias_stage);

// dLoss/draw at each output site (L1 subgradient, 0 at ties).
SparseField stage_loss_gradient(const SparseField& raw_pred, const TsdfVolume& gt,
                                const ActiveSet& region, double bias_stage);

struct NetworkGradients {
  std::vector<std::vector<double>> node_weights, node_bias, node_scale, node_shift;
  std::vector<double> head_weights;
  double head_bias = 0.0;
  SparseField input_grad;
  SparseField extern_grad;  // only when the graph concatenates an external field

  // Same layout as flatten_params (export projection slots are zero: the
  // export path never feeds the stage losses).
  std::vector<double> flatten(const NetworkGraph& graph, const DecodeHead& head) const;
};

// Reverse mode through head, ReLU, affine, conv rulebooks and skip concats,
// starting from dLoss/draw on the decoded output.
NetworkGradients network_backward(const NetworkGraph& graph, const DecodeHead& head,
                                  const ForwardResult& cache, const SparseField& raw_grad);

struct AdamState {
  std::vector<double> m, v;
  std::int64_t step = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

void adam_step(std::vector<double>& weights, const std::vector<double>& grads, AdamState& state,
               double lr = 1e-4);

struct ToyTrainReport {
  double zero_net_loss = 0.0;
  double first_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> losses;
};

// Desk-scale Adam loop over a single fixed example. Mutates graph/head in place.
ToyTrainReport train_stage(NetworkGraph& graph, DecodeHead& head, const SparseField& input,
                           const SparseField* extern_field, const TsdfVolume& gt,
                           const ActiveSet& region, double bias_stage, int steps,
                           double lr = 1e-4);

}  // namespace voxband

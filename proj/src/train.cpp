#include "voxband/train.hpp"

#include <cmath>

#include "voxband/errors.hpp"

namespace voxband {

namespace {

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

void check_region(const SparseField& raw_pred, const TsdfVolume& gt, const ActiveSet& region) {
  if (raw_pred.channels() != 1) throw ConfigError("stage loss expects a 1-channel prediction");
  for (const auto& s : region.sites())
    if (raw_pred.active().rank_of(s) < 0 || gt.active().rank_of(s) < 0)
      throw ConfigError("loss region is not covered by both fields");
}

}  // namespace

double stage_loss(const SparseField& raw_pred, const TsdfVolume& gt, const ActiveSet& region,
                  double bias_stage) {
  check_region(raw_pred, gt, region);
  double loss = 0;
  for (const auto& s : region.sites()) {
    const double pred = raw_pred.value(raw_pred.active().rank_of(s), 0) + bias_stage;
    loss += std::abs(pred - gt.value(gt.active().rank_of(s)));
  }
  return loss;
}

SparseField stage_loss_gradient(const SparseField& raw_pred, const TsdfVolume& gt,
                                const ActiveSet& region, double bias_stage) {
  check_region(raw_pred, gt, region);
  SparseField grad(raw_pred.active_ptr(), 1, 0.0);
  for (const auto& s : region.sites()) {
    const std::int64_t rank = raw_pred.active().rank_of(s);
    const double pred = raw_pred.value(rank, 0) + bias_stage;
    grad.value(rank, 0) += sgn(pred - gt.value(gt.active().rank_of(s)));
  }
  return grad;
}

NetworkGradients network_backward(const NetworkGraph& graph, const DecodeHead& head,
                                  const ForwardResult& cache, const SparseField& raw_grad) {
  const size_t n = graph.nodes.size();
  if (cache.inputs.size() != n) throw ConfigError("forward cache does not match the graph");
  NetworkGradients g;
  g.node_weights.resize(n);
  g.node_bias.resize(n);
  g.node_scale.resize(n);
  g.node_shift.resize(n);

  // head: raw = head.w . feat + head.b per site
  const SparseField& feat = cache.output;
  if (head.weights.size() != std::size_t(feat.channels()))
    throw ConfigError("decode head width does not match the cached output");
  g.head_weights.assign(head.weights.size(), 0.0);
  SparseField cur_grad(feat.active_ptr(), feat.channels(), 0.0);
  for (std::int64_t i = 0; i < feat.size(); ++i) {
    const double gr = raw_grad.value(i, 0);
    if (gr == 0.0) continue;
    const auto f = feat.row(i);
    auto gf = cur_grad.row(i);
    for (size_t c = 0; c < head.weights.size(); ++c) {
      g.head_weights[c] += gr * f[c];
      gf[c] += gr * head.weights[c];
    }
    g.head_bias += gr;
  }

  std::vector<SparseField> slot_grad;  // stashed skip gradients, added at Save time
  for (size_t idx = n; idx-- > 0;) {
    const auto& node = graph.nodes[idx];
    switch (node.op) {
      case NetworkGraph::Op::Conv: {
        const ConvLayer& l = node.layer;
        g.node_weights[idx].assign(l.weights.size(), 0.0);
        g.node_bias[idx].assign(l.bias.size(), 0.0);
        if (l.affine) {
          g.node_scale[idx].assign(l.scale.size(), 0.0);
          g.node_shift[idx].assign(l.shift.size(), 0.0);
        }
        cur_grad = conv_backward(cache.inputs[idx], l, cache.rulebooks[idx], cache.preacts[idx],
                                 cur_grad, g.node_weights[idx], g.node_bias[idx],
                                 g.node_scale[idx], g.node_shift[idx]);
        break;
      }
      case NetworkGraph::Op::Save: {
        if (node.slot < int(slot_grad.size()) && slot_grad[size_t(node.slot)].size() > 0) {
          const SparseField& extra = slot_grad[size_t(node.slot)];
          for (std::int64_t i = 0; i < cur_grad.size(); ++i) {
            auto a = cur_grad.row(i);
            const auto b = extra.row(i);
            for (int c = 0; c < cur_grad.channels(); ++c) a[c] += b[c];
          }
        }
        break;
      }
      case NetworkGraph::Op::ConcatSave: {
        const int front = cache.inputs[idx].channels();
        const int back = cur_grad.channels() - front;
        SparseField gfront(cur_grad.active_ptr(), front, 0.0);
        SparseField gback(cur_grad.active_ptr(), back, 0.0);
        for (std::int64_t i = 0; i < cur_grad.size(); ++i) {
          const auto row = cur_grad.row(i);
          auto f = gfront.row(i);
          auto b = gback.row(i);
          for (int c = 0; c < front; ++c) f[c] = row[c];
          for (int c = 0; c < back; ++c) b[c] = row[front + c];
        }
        if (node.slot >= int(slot_grad.size())) slot_grad.resize(node.slot + 1);
        auto& stash = slot_grad[size_t(node.slot)];
        if (stash.size() == 0) {
          stash = std::move(gback);
        } else {
          for (std::int64_t i = 0; i < stash.size(); ++i) {
            auto a = stash.row(i);
            const auto b = gback.row(i);
            for (int c = 0; c < back; ++c) a[c] += b[c];
          }
        }
        cur_grad = std::move(gfront);
        break;
      }
      case NetworkGraph::Op::ConcatExtern: {
        const int front = cache.inputs[idx].channels();
        const int back = cur_grad.channels() - front;
        SparseField gfront(cur_grad.active_ptr(), front, 0.0);
        SparseField gback(cur_grad.active_ptr(), back, 0.0);
        for (std::int64_t i = 0; i < cur_grad.size(); ++i) {
          const auto row = cur_grad.row(i);
          auto f = gfront.row(i);
          auto b = gback.row(i);
          for (int c = 0; c < front; ++c) f[c] = row[c];
          for (int c = 0; c < back; ++c) b[c] = row[front + c];
        }
        if (g.extern_grad.size() == 0) {
          g.extern_grad = std::move(gback);
        } else {
          for (std::int64_t i = 0; i < g.extern_grad.size(); ++i) {
            auto a = g.extern_grad.row(i);
            const auto b = gback.row(i);
            for (int c = 0; c < back; ++c) a[c] += b[c];
          }
        }
        cur_grad = std::move(gfront);
        break;
      }
    }
  }
  g.input_grad = std::move(cur_grad);
  return g;
}

std::vector<double> NetworkGradients::flatten(const NetworkGraph& graph,
                                              const DecodeHead& head) const {
  std::vector<double> flat;
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    if (graph.nodes[i].op != NetworkGraph::Op::Conv) continue;
    flat.insert(flat.end(), node_weights[i].begin(), node_weights[i].end());
    flat.insert(flat.end(), node_bias[i].begin(), node_bias[i].end());
    if (graph.nodes[i].layer.affine) {
      flat.insert(flat.end(), node_scale[i].begin(), node_scale[i].end());
      flat.insert(flat.end(), node_shift[i].begin(), node_shift[i].end());
    }
  }
  if (graph.has_export)
    flat.insert(flat.end(),
                graph.export_proj.weights.size() + graph.export_proj.bias.size(), 0.0);
  flat.insert(flat.end(), head_weights.begin(), head_weights.end());
  flat.push_back(head_bias);
  if (flat.size() != flatten_params(graph, head).size())
    throw ConfigError("gradient layout does not match the parameter layout");
  return flat;
}

void adam_step(std::vector<double>& weights, const std::vector<double>& grads, AdamState& state,
               double lr) {
  if (weights.size() != grads.size()) throw ConfigError("adam shape mismatch");
  if (state.m.empty()) {
    state.m.assign(weights.size(), 0.0);
    state.v.assign(weights.size(), 0.0);
  }
  if (state.m.size() != weights.size()) throw ConfigError("adam state shape mismatch");
  state.step += 1;
  const double c1 = 1.0 - std::pow(state.beta1, double(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, double(state.step));
  for (size_t i = 0; i < weights.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    weights[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + state.eps);
  }
}

ToyTrainReport train_stage(NetworkGraph& graph, DecodeHead& head, const SparseField& input,
                           const SparseField* extern_field, const TsdfVolume& gt,
                           const ActiveSet& region, double bias_stage, int steps, double lr) {
  ToyTrainReport report;
  {
    SparseField zero_raw(input.active_ptr(), 1, 0.0);
    // region sites live on the network output set, which equals the input set
    // for every graph built here (stride levels come back up before the head)
    report.zero_net_loss = stage_loss(zero_raw, gt, region, bias_stage);
  }
  AdamState state;
  std::vector<Rulebook> cached;
  for (int step = 0; step < steps; ++step) {
    ForwardResult fwd = network_forward(graph, input, extern_field,
                                        cached.empty() ? nullptr : &cached);
    if (cached.empty()) cached = fwd.rulebooks;
    const SparseField raw = decode_raw(fwd.output, head);
    const double loss = stage_loss(raw, gt, region, bias_stage);
    report.losses.push_back(loss);
    if (step == 0) report.first_loss = loss;
    report.final_loss = loss;
    const SparseField raw_grad = stage_loss_gradient(raw, gt, region, bias_stage);
    const NetworkGradients grads = network_backward(graph, head, fwd, raw_grad);
    std::vector<double> flat_w = flatten_params(graph, head);
    const std::vector<double> flat_g = grads.flatten(graph, head);
    adam_step(flat_w, flat_g, state, lr);
    unflatten_params(flat_w, graph, head);
  }
  return report;
}

}  // namespace voxband

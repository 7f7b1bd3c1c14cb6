#include "voxband/network.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "voxband/errors.hpp"
#include "voxband/parallel.hpp"

namespace voxband {

int NetworkGraph::input_channels() const {
  for (const auto& n : nodes)
    if (n.op == Op::Conv) return n.layer.in_channels;
  throw ConfigError("graph has no convolution layers");
}

ForwardResult network_forward(const NetworkGraph& graph, const SparseField& input,
                              const SparseField* extern_field,
                              const std::vector<Rulebook>* cached_rulebooks) {
  const size_t n = graph.nodes.size();
  ForwardResult res;
  res.inputs.resize(n);
  res.preacts.resize(n);
  res.rulebooks.resize(n);

  SparseField cur = input;
  std::vector<Rulebook*> strided_stack;
  for (size_t i = 0; i < n; ++i) {
    const auto& node = graph.nodes[i];
    switch (node.op) {
      case NetworkGraph::Op::Conv: {
        const ConvLayer& l = node.layer;
        if (cached_rulebooks) {
          res.rulebooks[i] = (*cached_rulebooks)[i];
        } else if (l.kernel == 3) {
          switch (l.variant) {
            case ConvVariant::Submanifold:
              res.rulebooks[i] = build_submanifold_rulebook(cur.active_ptr());
              break;
            case ConvVariant::Strided:
              res.rulebooks[i] = build_strided_rulebook(cur.active_ptr());
              break;
            case ConvVariant::Transposed:
              if (strided_stack.empty())
                throw ConfigError("transposed layer without a preceding strided layer");
              res.rulebooks[i] = transpose_rulebook(*strided_stack.back());
              break;
          }
        }
        if (l.variant == ConvVariant::Strided)
          strided_stack.push_back(&res.rulebooks[i]);
        else if (l.variant == ConvVariant::Transposed && !strided_stack.empty())
          strided_stack.pop_back();
        res.inputs[i] = cur;
        cur = conv_forward(cur, l, res.rulebooks[i], &res.preacts[i]);
        break;
      }
      case NetworkGraph::Op::Save: {
        if (node.slot >= int(res.slots.size())) res.slots.resize(node.slot + 1);
        res.slots[size_t(node.slot)] = cur;
        break;
      }
      case NetworkGraph::Op::ConcatSave: {
        if (node.slot < 0 || node.slot >= int(res.slots.size()) ||
            res.slots[size_t(node.slot)].size() == 0)
          throw ConfigError("concat references an unfilled slot");
        res.inputs[i] = cur;
        cur = SparseField::concat(cur, res.slots[size_t(node.slot)]);
        break;
      }
      case NetworkGraph::Op::ConcatExtern: {
        if (!extern_field) throw ConfigError("graph expects an external feature field");
        res.inputs[i] = cur;
        cur = SparseField::concat(cur, *extern_field);
        break;
      }
    }
  }
  res.output = std::move(cur);

  if (graph.has_export) {
    if (graph.export_slot_a >= int(res.slots.size()) ||
        graph.export_slot_b >= int(res.slots.size()))
      throw ConfigError("export taps reference unfilled slots");
    const SparseField tap = SparseField::concat(res.slots[size_t(graph.export_slot_a)],
                                                res.slots[size_t(graph.export_slot_b)]);
    res.export_field = conv_forward(tap, graph.export_proj, Rulebook{});
  }
  return res;
}

SparseField decode_raw(const SparseField& feature, const DecodeHead& head) {
  if (head.weights.size() != std::size_t(feature.channels()))
    throw ConfigError("decode head width does not match the feature channels");
  SparseField out(feature.active_ptr(), 1, 0.0);
  parallel_for(0, feature.size(), [&](std::int64_t i) {
    const auto f = feature.row(i);
    double v = head.bias;
    for (size_t c = 0; c < head.weights.size(); ++c) v += head.weights[c] * f[c];
    out.value(i, 0) = v;
  });
  return out;
}

TsdfVolume decode_tsdf(const SparseField& feature, const DecodeHead& head, double bias_stage,
                       double truncation_cm) {
  SparseField raw = decode_raw(feature, head);
  TsdfVolume tsdf{SparseField(feature.active_ptr(), 1, truncation_cm), truncation_cm};
  parallel_for(0, raw.size(), [&](std::int64_t i) {
    tsdf.field.value(i, 0) =
        std::clamp(raw.value(i, 0) + bias_stage, -truncation_cm, truncation_cm);
  });
  return tsdf;
}

void init_network(NetworkGraph& graph, DecodeHead& head, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto he_fill = [&rng](ConvLayer& l) {
    const double limit = std::sqrt(6.0 / (l.offsets() * l.in_channels));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& w : l.weights) w = dist(rng);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
    if (l.affine) {
      l.scale.assign(size_t(l.out_channels), 1.0);
      l.shift.assign(size_t(l.out_channels), 0.0);
    }
  };
  for (auto& node : graph.nodes)
    if (node.op == NetworkGraph::Op::Conv) he_fill(node.layer);
  if (graph.has_export) he_fill(graph.export_proj);
  if (!head.weights.empty()) {
    const double limit = std::sqrt(6.0 / double(head.weights.size()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& w : head.weights) w = dist(rng);
    head.bias = 0.0;
  }
}

namespace {

template <typename Fn>
void visit_params(const NetworkGraph& graph, const DecodeHead&, Fn&& fn) {
  for (const auto& node : graph.nodes) {
    if (node.op != NetworkGraph::Op::Conv) continue;
    fn(node.layer.weights);
    fn(node.layer.bias);
    if (node.layer.affine) {
      fn(node.layer.scale);
      fn(node.layer.shift);
    }
  }
  if (graph.has_export) {
    fn(graph.export_proj.weights);
    fn(graph.export_proj.bias);
  }
}

template <typename Fn>
void visit_params(NetworkGraph& graph, DecodeHead&, Fn&& fn) {
  for (auto& node : graph.nodes) {
    if (node.op != NetworkGraph::Op::Conv) continue;
    fn(node.layer.weights);
    fn(node.layer.bias);
    if (node.layer.affine) {
      fn(node.layer.scale);
      fn(node.layer.shift);
    }
  }
  if (graph.has_export) {
    fn(graph.export_proj.weights);
    fn(graph.export_proj.bias);
  }
}

}  // namespace

std::vector<double> flatten_params(const NetworkGraph& graph, const DecodeHead& head) {
  std::vector<double> flat;
  visit_params(graph, head, [&flat](const std::vector<double>& v) {
    flat.insert(flat.end(), v.begin(), v.end());
  });
  flat.insert(flat.end(), head.weights.begin(), head.weights.end());
  flat.push_back(head.bias);
  return flat;
}

void unflatten_params(const std::vector<double>& flat, NetworkGraph& graph, DecodeHead& head) {
  size_t pos = 0;
  visit_params(graph, head, [&](std::vector<double>& v) {
    if (pos + v.size() > flat.size()) throw ConfigError("parameter vector too short");
    std::copy(flat.begin() + pos, flat.begin() + pos + v.size(), v.begin());
    pos += v.size();
  });
  if (pos + head.weights.size() + 1 != flat.size())
    throw ConfigError("parameter vector length mismatch");
  std::copy(flat.begin() + pos, flat.begin() + pos + head.weights.size(), head.weights.begin());
  head.bias = flat.back();
}

namespace {

template <typename T>
void wle(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T rle(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

void write_layer(std::ostream& out, const ConvLayer& l) {
  wle<std::uint8_t>(out, std::uint8_t(l.variant));
  wle<std::uint8_t>(out, std::uint8_t(l.kernel));
  wle<std::uint8_t>(out, l.relu ? 1 : 0);
  wle<std::uint8_t>(out, l.affine ? 1 : 0);
  wle<std::uint32_t>(out, std::uint32_t(l.in_channels));
  wle<std::uint32_t>(out, std::uint32_t(l.out_channels));
  for (double w : l.weights) wle<float>(out, float(w));
  for (double b : l.bias) wle<float>(out, float(b));
  if (l.affine) {
    for (double s : l.scale) wle<float>(out, float(s));
    for (double s : l.shift) wle<float>(out, float(s));
  }
}

ConvLayer read_layer(std::istream& in) {
  ConvLayer l;
  l.variant = ConvVariant(rle<std::uint8_t>(in));
  l.kernel = rle<std::uint8_t>(in);
  l.relu = rle<std::uint8_t>(in) != 0;
  l.affine = rle<std::uint8_t>(in) != 0;
  l.in_channels = int(rle<std::uint32_t>(in));
  l.out_channels = int(rle<std::uint32_t>(in));
  l.weights.resize(std::size_t(l.offsets()) * l.in_channels * l.out_channels);
  l.bias.resize(size_t(l.out_channels));
  for (auto& w : l.weights) w = rle<float>(in);
  for (auto& b : l.bias) b = rle<float>(in);
  if (l.affine) {
    l.scale.resize(size_t(l.out_channels));
    l.shift.resize(size_t(l.out_channels));
    for (auto& s : l.scale) s = rle<float>(in);
    for (auto& s : l.shift) s = rle<float>(in);
  }
  return l;
}

}  // namespace

void save_checkpoint(const std::string& path, const NetworkGraph& graph,
                     const DecodeHead& head) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out.write("VBW1", 4);
  wle<std::uint32_t>(out, std::uint32_t(graph.nodes.size()));
  for (const auto& node : graph.nodes) {
    wle<std::uint8_t>(out, std::uint8_t(node.op));
    if (node.op == NetworkGraph::Op::Conv)
      write_layer(out, node.layer);
    else
      wle<std::int32_t>(out, node.slot);
  }
  wle<std::uint8_t>(out, graph.has_export ? 1 : 0);
  if (graph.has_export) {
    wle<std::int32_t>(out, graph.export_slot_a);
    wle<std::int32_t>(out, graph.export_slot_b);
    write_layer(out, graph.export_proj);
  }
  wle<std::uint32_t>(out, std::uint32_t(head.weights.size()));
  for (double w : head.weights) wle<float>(out, float(w));
  wle<float>(out, float(head.bias));
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

void load_checkpoint(const std::string& path, NetworkGraph& graph, DecodeHead& head) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "VBW1", 4) != 0) throw IoError("not a VBW1 checkpoint: " + path);
  graph = NetworkGraph{};
  const auto n = rle<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n; ++i) {
    NetworkGraph::Node node;
    node.op = NetworkGraph::Op(rle<std::uint8_t>(in));
    if (node.op == NetworkGraph::Op::Conv)
      node.layer = read_layer(in);
    else
      node.slot = rle<std::int32_t>(in);
    graph.nodes.push_back(std::move(node));
  }
  graph.has_export = rle<std::uint8_t>(in) != 0;
  if (graph.has_export) {
    graph.export_slot_a = rle<std::int32_t>(in);
    graph.export_slot_b = rle<std::int32_t>(in);
    graph.export_proj = read_layer(in);
  }
  head.weights.resize(rle<std::uint32_t>(in));
  for (auto& w : head.weights) w = rle<float>(in);
  head.bias = rle<float>(in);
  if (!in) throw IoError("truncated checkpoint: " + path);
}

NetworkGraph make_coarse_unet(int in_channels, const std::vector<int>& plan,
                              int export_channels) {
  if (plan.size() != 3) throw ConfigError("coarse net expects a three-level channel plan");
  const int c1 = plan[0], c2 = plan[1], c3 = plan[2];
  NetworkGraph g;
  auto conv = [&g](ConvVariant v, int ci, int co) {
    g.nodes.push_back({NetworkGraph::Op::Conv, make_conv(v, ci, co, true), -1});
  };
  auto save = [&g](int slot) { g.nodes.push_back({NetworkGraph::Op::Save, {}, slot}); };
  auto cat = [&g](int slot) { g.nodes.push_back({NetworkGraph::Op::ConcatSave, {}, slot}); };

  conv(ConvVariant::Submanifold, in_channels, c1);
  save(0);
  conv(ConvVariant::Strided, c1, c2);
  conv(ConvVariant::Submanifold, c2, c2);
  save(1);
  conv(ConvVariant::Strided, c2, c3);
  conv(ConvVariant::Submanifold, c3, c3);
  save(2);
  conv(ConvVariant::Strided, c3, c3);
  conv(ConvVariant::Submanifold, c3, c3);
  conv(ConvVariant::Transposed, c3, c3);
  cat(2);
  conv(ConvVariant::Submanifold, 2 * c3, c3);
  conv(ConvVariant::Transposed, c3, c2);
  cat(1);
  conv(ConvVariant::Submanifold, 2 * c2, c2);
  conv(ConvVariant::Transposed, c2, c1);
  save(3);
  cat(0);
  conv(ConvVariant::Submanifold, 2 * c1, c1);
  save(4);

  g.has_export = true;
  g.export_slot_a = 3;
  g.export_slot_b = 4;
  g.export_proj = make_conv(ConvVariant::Submanifold, 2 * c1, export_channels, false, 1);
  return g;
}

NetworkGraph make_fine_net(int in_channels, int extern_channels, int width) {
  NetworkGraph g;
  auto conv = [&g](int ci, int co) {
    g.nodes.push_back(
        {NetworkGraph::Op::Conv, make_conv(ConvVariant::Submanifold, ci, co, true), -1});
  };
  conv(in_channels, width);
  g.nodes.push_back({NetworkGraph::Op::ConcatExtern, {}, -1});
  conv(width + extern_channels, width);
  g.nodes.push_back({NetworkGraph::Op::ConcatExtern, {}, -1});
  conv(width + extern_channels, width);
  return g;
}

NetworkGraph make_logit_net(int in_channels, int width) {
  NetworkGraph g;
  auto conv = [&g](int ci, int co, bool relu) {
    g.nodes.push_back(
        {NetworkGraph::Op::Conv, make_conv(ConvVariant::Submanifold, ci, co, relu), -1});
  };
  conv(in_channels, width, true);
  conv(width, width, true);
  conv(width, width, true);
  return g;
}

}  // namespace voxband

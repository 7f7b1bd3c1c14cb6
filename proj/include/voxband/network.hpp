#pragma once

#include <string>
#include <vector>

#include "voxband/sparse_conv.hpp"
#include "voxband/tsdf.hpp"

namespace voxband {

// Ordered layer graph with save/concat skip edges. Strided layers push their
// rulebook on a stack; transposed layers pop and run its exact adjoint, so
// decoder levels land back on the matching encoder active sets.
struct NetworkGraph {
  enum class Op { Conv, Save, ConcatSave, ConcatExtern };
  struct Node {
    Op op = Op::Conv;
    ConvLayer layer;  // Conv only
    int slot = -1;    // Save / ConcatSave
  };
  std::vector<Node> nodes;

  // Optional 32-channel feature export: a kernel-1 projection of
  // concat(slots[export_slot_a], slots[export_slot_b]).
  bool has_export = false;
  int export_slot_a = -1;
  int export_slot_b = -1;
  ConvLayer export_proj;

  int input_channels() const;
};

// Single FC decode row applied per site.
struct DecodeHead {
  std::vector<double> weights;
  double bias = 0.0;
};

struct ForwardResult {
  SparseField output;
  SparseField export_field;  // empty unless the graph defines an export
  // backward caches, aligned with graph.nodes
  std::vector<SparseField> inputs;
  std::vector<SparseField> preacts;
  std::vector<Rulebook> rulebooks;
  std::vector<SparseField> slots;
};

// `cached_rulebooks` (node-aligned, from a previous ForwardResult) skips the
// rulebook rebuild when the active sets have not changed.
ForwardResult network_forward(const NetworkGraph& graph, const SparseField& input,
                              const SparseField* extern_field = nullptr,
                              const std::vector<Rulebook>* cached_rulebooks = nullptr);

// Raw per-site head response, no stage bias and no clamp.
SparseField decode_raw(const SparseField& feature, const DecodeHead& head);

// value = clamp(head(feature) + bias_stage, +/-truncation); inactive sites
// implicitly sit at +bias_stage by the submanifold zero convention.
TsdfVolume decode_tsdf(const SparseField& feature, const DecodeHead& head, double bias_stage,
                       double truncation_cm);

// He-style uniform fan-in initialization of every conv layer and the head.
void init_network(NetworkGraph& graph, DecodeHead& head, std::uint64_t seed);

// Flat parameter views for the optimizer: conv weights/bias/affine in node
// order, export projection, then head.
std::vector<double> flatten_params(const NetworkGraph& graph, const DecodeHead& head);
void unflatten_params(const std::vector<double>& flat, NetworkGraph& graph, DecodeHead& head);

// "VBW1" checkpoint: graph topology + weights + head, little-endian float32.
void save_checkpoint(const std::string& path, const NetworkGraph& graph, const DecodeHead& head);
void load_checkpoint(const std::string& path, NetworkGraph& graph, DecodeHead& head);

// Coarse hourglass: three strided levels with skip concats, mirrored decoder,
// and a kernel-1 export tap over the last two decoder outputs.
NetworkGraph make_coarse_unet(int in_channels, const std::vector<int>& plan = {64, 96, 128},
                              int export_channels = 32);
// Fine refiner: three submanifold blocks; the coarse export is concatenated
// before the last two of them.
NetworkGraph make_fine_net(int in_channels, int extern_channels, int width = 64);
// Per-view scalar logit net for texture blending.
NetworkGraph make_logit_net(int in_channels, int width = 32);

}  // namespace voxband

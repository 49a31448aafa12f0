#pragma once

#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphtx/attention_bias.hpp"
#include "graphtx/gnn.hpp"
#include "graphtx/graph.hpp"
#include "graphtx/positional.hpp"
#include "graphtx/structure.hpp"
#include "graphtx/tape.hpp"
#include "graphtx/transformer.hpp"

namespace gtx {

/// One model variant: the vanilla Transformer plus exactly one of the three
/// graph-injection families. Parsed from strings like "vanilla",
/// "ga:alternate:gcn", "pe:eig:4", "at:mask-n:2", "at:kernel:diffusion:0.5".
struct VariantDesc {
  enum class Family { Vanilla, Ga, Pe, At };
  Family family = Family::Vanilla;
  std::string kind;  // before|alternate|parallel, degree|eig|svd, mask-1|mask-n|spb|pma|kernel|edge-mask|edge-bias
  GnnKind gnn = GnnKind::Gcn;
  int gnn_depth = 2;  // before-pattern stack depth
  int pe_size = 4;    // k (eig) or r (svd)
  int hops = 2;       // mask-n
  int views = 3;      // pma
  KernelSpec kernel{KernelKind::Diffusion, 0.5};
  int path_embeddings = kMaxSpd + 1;  // edge-bias weight count

  static VariantDesc parse(const std::string& s);
  std::string str() const;
  bool uses_edge_features() const { return kind == "edge-mask" || kind == "edge-bias"; }
};

/// StructCache requirements implied by a variant.
StructOptions struct_options_for(const VariantDesc& v);

/// One (sub)graph prepared for forward passes: padded tokens, validity mask,
/// and every variant-specific constant, so a training step only assembles
/// tape nodes.
struct Instance {
  Graph graph;
  StructCache cache;
  int n_pad = 0;
  Matrix tokens;
  std::vector<double> valid;
  int target_index = -1;  // >= 0 routes through the target-node readout
  double target = 0.0;

  std::vector<Matrix> head_masks;
  Matrix kernel;
  std::vector<double> deg_inv_sqrt;
  Matrix spd_onehot;
  Matrix pma_phi;
  Matrix e_flat;
  Matrix bc_coeff;
  Matrix pe_base;
  Matrix deg_onehot_in;
  Matrix deg_onehot_out;
  GnnContext gnn_ctx;
};

Instance make_instance(Graph g, const VariantDesc& v, const ModelConfig& cfg, int n_pad,
                       int target_index, double target);

/// One batch: padded token tensors (B x n_pad x d_in) with their pad masks,
/// per-graph Graph/StructCache references, and targets. Members either point
/// into a prepared-instance cache or are owned fresh samples (node-level
/// training resamples each visit). A deque keeps owned members' addresses
/// stable as the batch grows.
struct Batch {
  int n_pad = 0;
  std::deque<Instance> owned;
  std::vector<const Instance*> items;

  void add(const Instance* inst) { items.push_back(inst); }
  void add_owned(Instance inst) {
    owned.push_back(std::move(inst));
    items.push_back(&owned.back());
  }
  size_t size() const { return items.size(); }
};

/// Parameter store plus the forward assembly for a variant. Parameters are
/// plain matrices; every step binds them as fresh tape leaves.
class Model {
 public:
  ModelConfig cfg;
  VariantDesc variant;
  int feature_dim = 0;
  int out_dim = 1;
  int edge_dim = 0;
  bool directed = false;

  std::vector<std::string> names;
  std::vector<Matrix> params;

  static Model build(const ModelConfig& cfg, const VariantDesc& variant, int feature_dim,
                     int out_dim, bool directed, int edge_dim, uint64_t seed);

  int param_index(const std::string& name) const;
  Matrix& param(const std::string& name);
  size_t param_count() const { return params.size(); }

  /// Binds every parameter as a leaf, in declaration order.
  std::vector<NodeId> bind(Tape& t) const;

  /// Prediction node: 1 x out_dim under mean/target readouts, n_pad x out_dim
  /// per-node. aug_rng drives PE sign-flip augmentation (training only).
  NodeId forward(Tape& t, const std::vector<NodeId>& ids, const Instance& inst,
                 ReadoutKind readout, bool training = false, Rng* dropout_rng = nullptr,
                 Rng* aug_rng = nullptr) const;

 private:
  std::unordered_map<std::string, int> index_;
};

}  // namespace gtx

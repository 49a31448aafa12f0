#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "graphtx/matrix.hpp"
#include "graphtx/rng.hpp"
#include "graphtx/tape.hpp"

namespace gtx {

enum class Activation { Relu, Gelu };
enum class SizeTag { Small, Middle, Large };

SizeTag size_tag_from_string(const std::string& s);
std::string to_string(SizeTag tag);

struct ModelConfig {
  int layers = 6;
  int d = 80;
  int d_f = 80;
  int heads = 8;
  int head_dim = 10;
  Activation activation = Activation::Gelu;
  double attn_dropout = 0.1;
  double ffn_dropout = 0.1;
  SizeTag size = SizeTag::Small;

  /// Size tags bind exactly to the published size table rows.
  static ModelConfig from_size(SizeTag tag);
  void validate() const;  // heads * head_dim == d, positive dims
};

/// Tape leaf ids for one encoder block.
struct LayerParamIds {
  NodeId q = -1, k = -1, v = -1, o = -1;
  NodeId w1 = -1, b1 = -1, w2 = -1, b2 = -1;
  NodeId ln1_gain = -1, ln1_bias = -1, ln2_gain = -1, ln2_bias = -1;
};

/// Closed set of attention-matrix modifications. Mask carries per-head (or
/// one shared) 0/1 matrices realized as -inf pre-softmax fills, plus an
/// optional multiplicative score scale (edge-feature masking).
/// AdditiveBias carries per-head (or shared) tape nodes added to the scores.
/// KernelHadamard multiplies shared-QK scores by a dense kernel and
/// optionally applies the degree-normalized residual.
struct AttnModifier {
  enum class Kind { None, Mask, AdditiveBias, KernelHadamard };
  Kind kind = Kind::None;
  std::vector<Matrix> head_masks;
  NodeId score_scale = -1;
  std::vector<NodeId> head_bias;
  Matrix kernel;
  bool shared_qk = false;
  bool degree_norm_residual = false;
  std::vector<double> degree_inv_sqrt;
};

/// Dropout is active only when a training rng is supplied.
struct TrainContext {
  Rng* dropout_rng = nullptr;
  double attn_dropout = 0.0;
  double ffn_dropout = 0.0;
};

/// (1/sqrt(scale_dim)) * (xQ)(xK)^T, plain-matrix form.
Matrix attention_scores(const Matrix& x, const Matrix& q, const Matrix& k, int scale_dim);

/// Multi-head self-attention block: per-head scores, modifier application,
/// row softmax, value mix, head concat, output projection, residual,
/// layer norm. pad_valid (0/1 per token, nullptr = all valid) excludes pad
/// columns from every row and confines pad rows to self-attention.
/// attn_out, when given, receives the post-softmax attention node per head
/// (verification surface).
NodeId mhsa_forward(Tape& t, NodeId x, const LayerParamIds& p, const ModelConfig& cfg,
                    const AttnModifier& mod, const std::vector<double>* pad_valid = nullptr,
                    TrainContext* train = nullptr, std::vector<NodeId>* attn_out = nullptr);

/// Position-wise feed-forward with residual and layer norm.
NodeId ffn_forward(Tape& t, NodeId m, const LayerParamIds& p, const ModelConfig& cfg,
                   TrainContext* train = nullptr);

enum class ReadoutKind { PerNode, MaskedMean, TargetNode };

/// Optional hook between attention and FFN (graph-hybrid composition point).
using BlockHook = std::function<NodeId(Tape&, NodeId m, int layer)>;

/// Sequential encoder blocks followed by a readout. `mods` holds either one
/// modifier shared by every layer or exactly `layers` entries.
NodeId model_forward(Tape& t, NodeId tokens, const std::vector<LayerParamIds>& params,
                     const ModelConfig& cfg, const std::vector<AttnModifier>& mods,
                     ReadoutKind readout, int target_index = -1,
                     const std::vector<double>* pad_valid = nullptr, TrainContext* train = nullptr,
                     const BlockHook& hook = nullptr);

/// Readout helper shared by model_forward and tests.
NodeId apply_readout(Tape& t, NodeId x, ReadoutKind readout, int target_index,
                     const std::vector<double>* pad_valid);

constexpr double kLayerNormEps = 1e-5;

}  // namespace gtx

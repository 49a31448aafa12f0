#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "graphtx/matrix.hpp"

namespace gtx {

using NodeId = int;

/// Reverse-mode tape. Operations append nodes in topological order; a single
/// reverse pass over the recorded entries yields gradients of a scalar seed
/// with respect to every leaf. A tape is confined to one execution context.
class Tape {
 public:
  /// Trainable input; gradients are reported for these.
  NodeId leaf(Matrix v);
  /// Non-trainable input; no gradient is propagated into it.
  NodeId constant(Matrix v);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  /// x (n x d) + row vector v (1 x d) broadcast over rows.
  NodeId add_rowvec(NodeId x, NodeId v);
  NodeId hadamard(NodeId a, NodeId b);
  NodeId scale(NodeId a, double s);
  /// Elementwise multiply by a 1x1 node (learnable scalar).
  NodeId scale_by_node(NodeId a, NodeId s);
  NodeId matmul(NodeId a, NodeId b);
  /// a * b^T
  NodeId matmul_nt(NodeId a, NodeId b);
  NodeId row_softmax(NodeId a);
  /// gain/bias are 1 x d nodes.
  NodeId layer_norm(NodeId x, NodeId gain, NodeId bias, double eps);
  NodeId relu(NodeId a);
  NodeId gelu(NodeId a);
  NodeId leaky_relu(NodeId a, double slope);
  NodeId abs(NodeId a);
  /// Where mask (same shape, 0/1) is 0, replace the entry by fill.
  NodeId masked_fill(NodeId a, const Matrix& mask, double fill);
  NodeId slice_cols(NodeId a, int c0, int c1);
  NodeId concat_cols(const std::vector<NodeId>& parts);
  NodeId reshape(NodeId a, int rows, int cols);
  NodeId sum_all(NodeId a);
  NodeId mean_all(NodeId a);
  /// Elementwise binary cross-entropy with logits against constant targets.
  NodeId bce_logits(NodeId logits, const Matrix& targets);
  /// Per-row cross-entropy of logit rows against constant one-hot rows -> n x 1.
  NodeId ce_logits(NodeId logits, const Matrix& onehot);

  const Matrix& value(NodeId id) const { return nodes_[id].value; }
  bool needs_grad(NodeId id) const { return nodes_[id].needs_grad; }
  size_t size() const { return nodes_.size(); }
  void reserve(size_t n) { nodes_.reserve(n); }

  /// Gradient of the scalar seed w.r.t. every leaf. Rejects non-scalar seeds.
  std::unordered_map<NodeId, Matrix> backward(NodeId seed) const;

 private:
  using BackFn = std::function<void(const Matrix& gout, const Tape& t, std::vector<Matrix>& grads)>;

  struct Node {
    Matrix value;
    BackFn back;
    bool needs_grad = false;
    bool is_leaf = false;
  };

  NodeId push(Matrix value, bool needs_grad, BackFn back, bool is_leaf = false);
  static void accumulate(std::vector<Matrix>& grads, NodeId id, const Matrix& delta);
  static void accumulate_scaled(std::vector<Matrix>& grads, NodeId id, const Matrix& delta, double s);

  std::vector<Node> nodes_;
  std::vector<NodeId> leaves_;
};

}  // namespace gtx

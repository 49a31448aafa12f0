#include "graphtx/losses.hpp"

#include <stdexcept>

namespace gtx {

NodeId loss_node(Tape& t, LossKind kind, NodeId pred, const Matrix& target, const Matrix* weight) {
  NodeId elems;
  switch (kind) {
    case LossKind::Mae:
      elems = t.abs(t.sub(pred, t.constant(target)));
      break;
    case LossKind::BceLogits:
      elems = t.bce_logits(pred, target);
      break;
    case LossKind::CrossEntropy:
      elems = t.ce_logits(pred, target);  // n x 1 row losses
      break;
    default:
      throw std::invalid_argument("loss_node: unknown kind");
  }
  const Matrix& ev = t.value(elems);
  if (!weight) return t.mean_all(elems);
  if (!ev.same_shape(*weight)) throw std::invalid_argument("loss_node: weight shape mismatch");
  double count = 0.0;
  for (size_t i = 0; i < weight->size(); ++i) count += weight->data()[i];
  if (count == 0.0) throw std::invalid_argument("loss_node: weight selects nothing");
  return t.scale(t.sum_all(t.hadamard(elems, t.constant(*weight))), 1.0 / count);
}

}  // namespace gtx

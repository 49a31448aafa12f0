#pragma once

#include "graphtx/matrix.hpp"
#include "graphtx/tape.hpp"

namespace gtx {

enum class LossKind { Mae, BceLogits, CrossEntropy };

/// Scalar loss node: mean over non-pad elements. `weight` is an optional 0/1
/// matrix (same shape as the elementwise loss) selecting the counted
/// entries; null means all. For CrossEntropy, `target` holds one-hot rows and
/// the weight selects rows (n x 1).
NodeId loss_node(Tape& t, LossKind kind, NodeId pred, const Matrix& target,
                 const Matrix* weight = nullptr);

}  // namespace gtx

#pragma once

#include <string>
#include <vector>

#include "graphtx/graph.hpp"
#include "graphtx/matrix.hpp"
#include "graphtx/tape.hpp"
#include "graphtx/transformer.hpp"

namespace gtx {

enum class GnnKind { Gcn, GatLite, Gin };

GnnKind gnn_kind_from_string(const std::string& s);
std::string to_string(GnnKind kind);

/// Tape leaves for one GNN layer; only the fields for its kind are bound.
struct GnnParamIds {
  GnnKind kind = GnnKind::Gcn;
  NodeId w = -1;                      // gcn / gat-lite projection
  NodeId a_src = -1, a_dst = -1;      // gat-lite attention vectors (d x 1)
  NodeId eps = -1;                    // gin (1 x 1)
  NodeId w1 = -1, b1 = -1, w2 = -1, b2 = -1;  // gin MLP
};

/// Per-graph constants for GNN layers, pad-extended to n_pad.
struct GnnContext {
  Matrix norm_adj;    // D~^{-1/2} (A + I) D~^{-1/2}; pad rows/cols zero
  Matrix adj;         // raw adjacency for neighbor sums
  Matrix self_mask;   // A + I with pad diagonal kept (gat softmax support)

  static GnnContext build(const Graph& g, int n_pad = 0);
};

/// D~^{-1/2} (A + I) D~^{-1/2}, the self-loop symmetric normalization.
Matrix gcn_normalized_adjacency(const Graph& g, int n_pad = 0);

/// One GNN layer on the tape:
///   gcn:      act(norm_adj * x * W)
///   gin:      MLP((1 + eps) x + A x)
///   gat-lite: single-head additive attention over neighbors+self
NodeId gnn_layer_forward(Tape& t, const GnnContext& ctx, NodeId x, const GnnParamIds& p,
                         Activation act);

/// The before-pattern preprocessing stack: x <- x + gnn(x), repeated.
NodeId gnn_stack_with_residual(Tape& t, const GnnContext& ctx, NodeId x,
                               const std::vector<GnnParamIds>& layers, Activation act);

constexpr double kGatLeakySlope = 0.2;

}  // namespace gtx

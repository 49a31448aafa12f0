#include "graphtx/gnn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "graphtx/structure.hpp"

namespace gtx {

GnnKind gnn_kind_from_string(const std::string& s) {
  if (s == "gcn") return GnnKind::Gcn;
  if (s == "gat" || s == "gat-lite") return GnnKind::GatLite;
  if (s == "gin") return GnnKind::Gin;
  throw std::invalid_argument("unknown gnn kind: " + s);
}

std::string to_string(GnnKind kind) {
  switch (kind) {
    case GnnKind::Gcn: return "gcn";
    case GnnKind::GatLite: return "gat";
    case GnnKind::Gin: return "gin";
  }
  return "?";
}

Matrix gcn_normalized_adjacency(const Graph& g, int n_pad) {
  const int n = g.n();
  const int np = n_pad > 0 ? n_pad : n;
  auto [indeg, outdeg] = degrees(g);
  (void)indeg;
  Matrix out(np, np);
  std::vector<double> inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(outdeg[i] + 1.0);
  for (int i = 0; i < n; ++i) {
    out(i, i) = inv_sqrt[i] * inv_sqrt[i];
    for (int j = 0; j < n; ++j)
      if (g.adjacency()(i, j) != 0.0) out(i, j) = inv_sqrt[i] * inv_sqrt[j];
  }
  return out;
}

GnnContext GnnContext::build(const Graph& g, int n_pad) {
  const int n = g.n();
  const int np = n_pad > 0 ? n_pad : n;
  GnnContext ctx;
  ctx.norm_adj = gcn_normalized_adjacency(g, np);
  ctx.adj = Matrix(np, np);
  ctx.self_mask = Matrix::identity(np);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (g.adjacency()(i, j) != 0.0) {
        ctx.adj(i, j) = 1.0;
        ctx.self_mask(i, j) = 1.0;
      }
  return ctx;
}

NodeId gnn_layer_forward(Tape& t, const GnnContext& ctx, NodeId x, const GnnParamIds& p,
                         Activation act) {
  const double ninf = -std::numeric_limits<double>::infinity();
  auto activate = [&](NodeId v) { return act == Activation::Relu ? t.relu(v) : t.gelu(v); };
  switch (p.kind) {
    case GnnKind::Gcn:
      return activate(t.matmul(t.constant(ctx.norm_adj), t.matmul(x, p.w)));
    case GnnKind::Gin: {
      NodeId self = t.add(x, t.scale_by_node(x, p.eps));
      NodeId agg = t.matmul(t.constant(ctx.adj), x);
      NodeId h = t.add(self, agg);
      NodeId hidden = activate(t.add_rowvec(t.matmul(h, p.w1), p.b1));
      return t.add_rowvec(t.matmul(hidden, p.w2), p.b2);
    }
    case GnnKind::GatLite: {
      const int n = t.value(x).rows();
      NodeId h = t.matmul(x, p.w);
      NodeId s_src = t.matmul(h, p.a_src);  // n x 1
      NodeId s_dst = t.matmul(h, p.a_dst);
      NodeId ones_row = t.constant(Matrix::filled(1, n, 1.0));
      NodeId ones_col = t.constant(Matrix::filled(n, 1, 1.0));
      // e_ij = leaky(src_i + dst_j) over neighbors+self
      NodeId e = t.add(t.matmul(s_src, ones_row), t.matmul(ones_col, t.reshape(s_dst, 1, n)));
      NodeId masked = t.masked_fill(t.leaky_relu(e, kGatLeakySlope), ctx.self_mask, ninf);
      NodeId alpha = t.row_softmax(masked);
      return activate(t.matmul(alpha, h));
    }
  }
  throw std::logic_error("gnn_layer_forward: unreachable");
}

NodeId gnn_stack_with_residual(Tape& t, const GnnContext& ctx, NodeId x,
                               const std::vector<GnnParamIds>& layers, Activation act) {
  for (const auto& layer : layers) x = t.add(x, gnn_layer_forward(t, ctx, x, layer, act));
  return x;
}

}  // namespace gtx

#include "graphtx/attention_bias.hpp"

#include <cmath>
#include <stdexcept>

namespace gtx {

Matrix pad_embed(const Matrix& m, int n_pad) {
  if (n_pad <= 0 || n_pad == m.rows()) return m;
  if (n_pad < m.rows()) throw std::invalid_argument("pad_embed: n_pad below matrix size");
  Matrix out(n_pad, n_pad);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

AttnModifier mask1_modifier(const StructCache& sc, int n_pad) {
  AttnModifier mod;
  mod.kind = AttnModifier::Kind::Mask;
  mod.head_masks.push_back(pad_embed(sc.hop(1), n_pad));
  return mod;
}

AttnModifier maskn_modifier(const StructCache& sc, int heads, int n_hops, int n_pad) {
  if (n_hops < 1) throw std::invalid_argument("maskn_modifier: n_hops must be >= 1");
  if (static_cast<int>(sc.hop_masks.size()) < n_hops)
    throw std::invalid_argument("maskn_modifier: StructCache lacks the requested hop masks");
  AttnModifier mod;
  mod.kind = AttnModifier::Kind::Mask;
  for (int h = 0; h < heads; ++h) mod.head_masks.push_back(pad_embed(sc.hop(h % n_hops + 1), n_pad));
  return mod;
}

Matrix row_normalized_adjacency(const Graph& g) {
  const int n = g.n();
  Matrix p = g.adjacency();
  for (int i = 0; i < n; ++i) {
    double rs = 0.0;
    for (int j = 0; j < n; ++j) rs += p(i, j);
    if (rs == 0.0) continue;
    for (int j = 0; j < n; ++j) p(i, j) /= rs;
  }
  return p;
}

Matrix spd_bucket_onehot(const Matrix& spd, int n_pad) {
  const int n = spd.rows();
  Matrix oh(n_pad * n_pad, kSpdBuckets);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = spd(i, j);
      const int b = d < 0.0 ? kMaxSpd + 1 : std::min(static_cast<int>(d), kMaxSpd);
      oh(i * n_pad + j, b) = 1.0;
    }
  return oh;
}

Matrix pma_phi_matrix(const Graph& g, int views, int n_pad) {
  if (views < 1) throw std::invalid_argument("pma_phi_matrix: views must be >= 1");
  const int n = g.n();
  Matrix phi(n_pad * n_pad, views);
  Matrix power = Matrix::identity(n);
  const Matrix p = row_normalized_adjacency(g);
  for (int m = 0; m < views; ++m) {
    if (m > 0) power = matmul(power, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) phi(i * n_pad + j, m) = power(i, j);
  }
  return phi;
}

Matrix edge_flat_features(const Graph& g, int n_pad) {
  if (!g.has_edge_features())
    throw std::invalid_argument("edge_flat_features: graph has no edge features");
  const int de = g.edge_feature_dim();
  Matrix flat(n_pad * n_pad, de);
  for (const auto& [key, feat] : g.edge_features())
    for (int c = 0; c < de; ++c) flat(key.first * n_pad + key.second, c) = feat[c];
  return flat;
}

Matrix path_bias_coefficients(const Graph& g, int n_max_embeddings, int n_pad) {
  if (!g.has_edge_features())
    throw std::invalid_argument("path_bias_coefficients: graph has no edge features");
  const int n = g.n();
  const int de = g.edge_feature_dim();
  Matrix coeff(n_pad * n_pad, n_max_embeddings * de);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      auto path = shortest_path_edges(g, i, j);
      if (!path) continue;  // unreachable pairs keep zero bias
      const int len = static_cast<int>(path->size());
      if (len > n_max_embeddings)
        throw std::invalid_argument("path_bias_coefficients: path length " + std::to_string(len) +
                                    " exceeds the embedding count " +
                                    std::to_string(n_max_embeddings));
      const double inv = 1.0 / len;
      for (int e = 0; e < len; ++e) {
        const auto& feat = g.edge_feature((*path)[e].first, (*path)[e].second);
        for (int c = 0; c < de; ++c) coeff(i * n_pad + j, e * de + c) = feat[c] * inv;
      }
    }
  return coeff;
}

AttnModifier spatial_bias_modifier(Tape& t, const Matrix& spd_onehot, NodeId table, int heads,
                                   int n_pad) {
  AttnModifier mod;
  mod.kind = AttnModifier::Kind::AdditiveBias;
  NodeId oh = t.constant(spd_onehot);
  for (int h = 0; h < heads; ++h)
    mod.head_bias.push_back(
        t.reshape(t.matmul(oh, t.slice_cols(table, h, h + 1)), n_pad, n_pad));
  return mod;
}

AttnModifier pma_bias_modifier(Tape& t, const Matrix& phi, NodeId b, int heads, int n_pad) {
  AttnModifier mod;
  mod.kind = AttnModifier::Kind::AdditiveBias;
  NodeId ph = t.constant(phi);
  for (int h = 0; h < heads; ++h)
    mod.head_bias.push_back(t.reshape(t.matmul(ph, t.slice_cols(b, h, h + 1)), n_pad, n_pad));
  return mod;
}

AttnModifier edge_path_bias_modifier(Tape& t, const Matrix& coeff, NodeId path_weights, int n_pad) {
  AttnModifier mod;
  mod.kind = AttnModifier::Kind::AdditiveBias;
  const Matrix& w = t.value(path_weights);
  NodeId flat = t.reshape(path_weights, w.rows() * w.cols(), 1);
  mod.head_bias.push_back(t.reshape(t.matmul(t.constant(coeff), flat), n_pad, n_pad));
  return mod;
}

AttnModifier edge_mask_modifier(Tape& t, const Matrix& mask, const Matrix& e_flat, NodeId w_e,
                                int n_pad) {
  AttnModifier mod;
  mod.kind = AttnModifier::Kind::Mask;
  mod.head_masks.push_back(mask);
  const int d = t.value(w_e).cols();
  NodeId mean_vec = t.constant(Matrix::filled(d, 1, 1.0 / d));
  NodeId per_pair = t.matmul(t.matmul(t.constant(e_flat), w_e), mean_vec);
  mod.score_scale = t.reshape(per_pair, n_pad, n_pad);
  return mod;
}

AttnModifier kernel_modifier(const StructCache& sc, int n_pad) {
  if (!sc.kernel) throw std::invalid_argument("kernel_modifier: StructCache has no kernel");
  AttnModifier mod;
  mod.kind = AttnModifier::Kind::KernelHadamard;
  mod.kernel = pad_embed(*sc.kernel, n_pad);
  mod.shared_qk = true;
  mod.degree_norm_residual = true;
  const int n = n_pad > 0 ? n_pad : static_cast<int>(sc.outdegree.size());
  mod.degree_inv_sqrt.assign(n, 0.0);
  for (size_t i = 0; i < sc.outdegree.size(); ++i)
    if (sc.outdegree[i] > 0.0) mod.degree_inv_sqrt[i] = 1.0 / std::sqrt(sc.outdegree[i]);
  return mod;
}

}  // namespace gtx

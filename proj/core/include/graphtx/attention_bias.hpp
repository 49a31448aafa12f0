#pragma once

#include "graphtx/graph.hpp"
#include "graphtx/matrix.hpp"
#include "graphtx/structure.hpp"
#include "graphtx/tape.hpp"
#include "graphtx/transformer.hpp"

namespace gtx {

/// Shortest-path-distance bias buckets: 0..kMaxSpd clipped, plus one bucket
/// for the unreachable sentinel (-1).
constexpr int kMaxSpd = 16;
constexpr int kSpdBuckets = kMaxSpd + 2;

/// Embeds an n x n matrix into n_pad x n_pad (pad entries zero).
Matrix pad_embed(const Matrix& m, int n_pad);

/// All heads share the adjacency+self mask; non-edges become -inf fills.
AttnModifier mask1_modifier(const StructCache& sc, int n_pad = 0);

/// Head h receives the ((h mod n_hops)+1)-hop mask.
AttnModifier maskn_modifier(const StructCache& sc, int heads, int n_hops, int n_pad = 0);

/// Row-normalized adjacency D^{-1} A (zero rows for isolated nodes).
Matrix row_normalized_adjacency(const Graph& g);

// --- per-graph constants consumed by the tape-side builders ---

/// One-hot SPD bucket rows: (n_pad^2) x kSpdBuckets, row-major over (i,j);
/// pad pairs map to no bucket (zero rows).
Matrix spd_bucket_onehot(const Matrix& spd, int n_pad);

/// Proximity views: (n_pad^2) x views matrix whose column m holds the entries
/// of the m-th power of the row-normalized adjacency (m = 0 is the identity).
Matrix pma_phi_matrix(const Graph& g, int views, int n_pad);

/// Dense edge-feature rows: (n_pad^2) x d_e; zero off the stored edge set
/// (including the diagonal, which therefore carries a neutral zero score).
Matrix edge_flat_features(const Graph& g, int n_pad);

/// Path-average coefficients: (n_pad^2) x (n_max_embeddings * d_e); row (i,j)
/// holds x_{e_t} / N in block t for each edge e_t on the deterministic
/// shortest path i -> j. Paths longer than n_max_embeddings are rejected.
Matrix path_bias_coefficients(const Graph& g, int n_max_embeddings, int n_pad);

// --- modifier builders; learnable tables enter as tape leaves ---

/// table is (kSpdBuckets x heads); bias_ij = table[bucket(spd_ij), h].
AttnModifier spatial_bias_modifier(Tape& t, const Matrix& spd_onehot, NodeId table, int heads,
                                   int n_pad);

/// b is (views x heads); bias_ij = sum_m phi_ij[m] * b[m, h].
AttnModifier pma_bias_modifier(Tape& t, const Matrix& phi, NodeId b, int heads, int n_pad);

/// path_weights is (n_max_embeddings x d_e); one bias shared by all heads.
AttnModifier edge_path_bias_modifier(Tape& t, const Matrix& coeff, NodeId path_weights, int n_pad);

/// w_e is (d_e x d); permitted scores are multiplied by mean_d(x_e W_E).
AttnModifier edge_mask_modifier(Tape& t, const Matrix& mask, const Matrix& e_flat, NodeId w_e,
                                int n_pad);

/// GraphiT-style kernel attention: shared-QK scores Hadamard the kernel, with
/// the degree-normalized residual.
AttnModifier kernel_modifier(const StructCache& sc, int n_pad = 0);

}  // namespace gtx

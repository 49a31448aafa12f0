#pragma once

#include <optional>

#include "graphtx/graph.hpp"
#include "graphtx/matrix.hpp"
#include "graphtx/rng.hpp"
#include "graphtx/structure.hpp"

namespace gtx {

/// Degree-table rows cover buckets 0..kMaxDegreeBucket; larger degrees clip.
constexpr int kMaxDegreeBucket = 64;
constexpr int kDegreeBuckets = kMaxDegreeBucket + 1;
/// Eigenvalues at or below this are treated as trivial (zero) modes.
constexpr double kTrivialEigThreshold = 1e-8;

/// Row i = table_in[min(indeg, 64)] + table_out[min(outdeg, 64)].
/// Undirected graphs use the unified single-table overload.
Matrix degree_pe(const Graph& g, const Matrix& table_in, const Matrix& table_out);
Matrix degree_pe(const Graph& g, const Matrix& table);

/// Eigenvectors of the k smallest non-trivial Laplacian eigenvalues; columns
/// beyond the available count are zero. Training mode independently negates
/// each column with probability 1/2. Undirected only.
Matrix laplacian_pe(const Graph& g, int k, Rng* rng = nullptr, bool training = false);

/// Top-r singular triples of the adjacency: concat(U sqrt(S), V sqrt(S)),
/// n x 2r. Training mode flips each (u_i, v_i) pair jointly. r > n rejected.
Matrix svd_pe(const Graph& g, int r, Rng* rng = nullptr, bool training = false);

/// X + P W + b (affine f_map); with null maps, plain addition (widths must
/// then match).
Matrix apply_pe(const Matrix& x, const Matrix& pe, const Matrix* w_map = nullptr,
                const Matrix* b_map = nullptr);

// --- building blocks shared with the model assembly ---

/// One-hot degree bucket rows (n_pad x kDegreeBuckets), pad rows zero.
Matrix degree_onehot(const std::vector<double>& deg, int n_pad);

/// Eval-mode Laplacian PE from a cached spectrum, zero-padded to n_pad rows.
Matrix laplacian_pe_base(const std::vector<double>& eigenvalues, const Matrix& eigenvectors, int k,
                         int n_pad);

/// Eval-mode SVD PE, zero-padded to n_pad rows.
Matrix svd_pe_base(const Matrix& adjacency, int r, int n_pad);

/// Per-column random sign flips (Laplacian PE augmentation).
void flip_columns(Matrix& pe, Rng& rng);
/// Joint (u_i, v_i) sign flips for an SVD PE with r pairs.
void flip_pairs(Matrix& pe, int r, Rng& rng);

}  // namespace gtx

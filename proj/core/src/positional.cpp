#include "graphtx/positional.hpp"

#include <cmath>
#include <stdexcept>

#include "graphtx/spectral.hpp"

namespace gtx {

namespace {
int bucket(double deg) { return std::min(static_cast<int>(deg), kMaxDegreeBucket); }
}  // namespace

Matrix degree_pe(const Graph& g, const Matrix& table_in, const Matrix& table_out) {
  if (table_in.cols() != table_out.cols())
    throw std::invalid_argument("degree_pe: table widths differ");
  auto [indeg, outdeg] = degrees(g);
  Matrix pe(g.n(), table_in.cols());
  for (int i = 0; i < g.n(); ++i) {
    const int bi = bucket(indeg[i]);
    const int bo = bucket(outdeg[i]);
    for (int j = 0; j < pe.cols(); ++j) pe(i, j) = table_in(bi, j) + table_out(bo, j);
  }
  return pe;
}

Matrix degree_pe(const Graph& g, const Matrix& table) {
  if (g.directed())
    throw std::invalid_argument("degree_pe: unified table applies to undirected graphs");
  auto [indeg, outdeg] = degrees(g);
  (void)outdeg;
  Matrix pe(g.n(), table.cols());
  for (int i = 0; i < g.n(); ++i) {
    const int b = bucket(indeg[i]);
    for (int j = 0; j < pe.cols(); ++j) pe(i, j) = table(b, j);
  }
  return pe;
}

Matrix laplacian_pe_base(const std::vector<double>& eigenvalues, const Matrix& eigenvectors, int k,
                         int n_pad) {
  const int n = eigenvectors.rows();
  Matrix pe(n_pad, k);
  int col = 0;
  for (int e = 0; e < n && col < k; ++e) {
    if (eigenvalues[e] <= kTrivialEigThreshold) continue;
    for (int i = 0; i < n; ++i) pe(i, col) = eigenvectors(i, e);
    ++col;
  }
  return pe;  // remaining columns stay zero
}

Matrix laplacian_pe(const Graph& g, int k, Rng* rng, bool training) {
  if (k < 1) throw std::invalid_argument("laplacian_pe: k must be >= 1");
  EigResult eig = sym_eig(normalized_laplacian(g));
  Matrix pe = laplacian_pe_base(eig.values, eig.vectors, k, g.n());
  if (training && rng) flip_columns(pe, *rng);
  return pe;
}

Matrix svd_pe_base(const Matrix& adjacency, int r, int n_pad) {
  const int n = adjacency.rows();
  if (r < 1) throw std::invalid_argument("svd_pe: r must be >= 1");
  if (r > n) throw std::invalid_argument("svd_pe: r exceeds the node count");
  SvdResult s = svd(adjacency);
  Matrix pe(n_pad, 2 * r);
  for (int c = 0; c < r; ++c) {
    const double root = std::sqrt(s.values[c]);
    for (int i = 0; i < n; ++i) {
      pe(i, c) = s.u(i, c) * root;
      pe(i, r + c) = s.v(i, c) * root;
    }
  }
  return pe;
}

Matrix svd_pe(const Graph& g, int r, Rng* rng, bool training) {
  Matrix pe = svd_pe_base(g.adjacency(), r, g.n());
  if (training && rng) flip_pairs(pe, r, *rng);
  return pe;
}

Matrix apply_pe(const Matrix& x, const Matrix& pe, const Matrix* w_map, const Matrix* b_map) {
  if (x.rows() != pe.rows()) throw std::invalid_argument("apply_pe: row counts differ");
  if (!w_map) {
    if (pe.cols() != x.cols())
      throw std::invalid_argument("apply_pe: width mismatch without a mapping network");
    return add(x, pe);
  }
  Matrix mapped = matmul(pe, *w_map);
  if (b_map)
    for (int i = 0; i < mapped.rows(); ++i)
      for (int j = 0; j < mapped.cols(); ++j) mapped(i, j) += (*b_map)(0, j);
  return add(x, mapped);
}

Matrix degree_onehot(const std::vector<double>& deg, int n_pad) {
  Matrix oh(n_pad, kDegreeBuckets);
  for (size_t i = 0; i < deg.size(); ++i) oh(static_cast<int>(i), bucket(deg[i])) = 1.0;
  return oh;
}

void flip_columns(Matrix& pe, Rng& rng) {
  for (int c = 0; c < pe.cols(); ++c)
    if (rng.bernoulli(0.5))
      for (int i = 0; i < pe.rows(); ++i) pe(i, c) = -pe(i, c);
}

void flip_pairs(Matrix& pe, int r, Rng& rng) {
  if (pe.cols() != 2 * r) throw std::invalid_argument("flip_pairs: width != 2r");
  for (int c = 0; c < r; ++c)
    if (rng.bernoulli(0.5))
      for (int i = 0; i < pe.rows(); ++i) {
        pe(i, c) = -pe(i, c);
        pe(i, r + c) = -pe(i, r + c);
      }
}

}  // namespace gtx

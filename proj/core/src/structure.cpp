#include "graphtx/structure.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "graphtx/spectral.hpp"

namespace gtx {

std::pair<std::vector<double>, std::vector<double>> degrees(const Graph& g) {
  const int n = g.n();
  std::vector<double> indeg(n, 0.0), outdeg(n, 0.0);
  const Matrix& a = g.adjacency();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a(i, j) != 0.0) {
        outdeg[i] += 1.0;
        indeg[j] += 1.0;
      }
  return {indeg, outdeg};
}

Matrix normalized_laplacian(const Graph& g) {
  if (g.directed())
    throw std::invalid_argument("normalized_laplacian: defined for undirected graphs only");
  const int n = g.n();
  auto [indeg, outdeg] = degrees(g);
  std::vector<double> inv_sqrt(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (indeg[i] > 0.0) inv_sqrt[i] = 1.0 / std::sqrt(indeg[i]);
  Matrix l(n, n);
  const Matrix& a = g.adjacency();
  for (int i = 0; i < n; ++i) {
    l(i, i) = 1.0;  // isolated nodes keep diagonal 1
    for (int j = 0; j < n; ++j)
      if (a(i, j) != 0.0) l(i, j) -= inv_sqrt[i] * inv_sqrt[j];
  }
  return l;
}

Matrix spd_matrix(const Graph& g) {
  const int n = g.n();
  Matrix d = Matrix::filled(n, n, -1.0);
  std::deque<int> queue;
  for (int s = 0; s < n; ++s) {
    d(s, s) = 0.0;
    queue.clear();
    queue.push_back(s);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int w : g.neighbors(u)) {
        if (d(s, w) >= 0.0) continue;
        d(s, w) = d(s, u) + 1.0;
        queue.push_back(w);
      }
    }
  }
  return d;
}

Matrix hop_mask_from_spd(const Matrix& spd, int h) {
  if (h < 1) throw std::invalid_argument("hop_mask: h must be >= 1");
  Matrix m(spd.rows(), spd.cols());
  for (int i = 0; i < spd.rows(); ++i)
    for (int j = 0; j < spd.cols(); ++j)
      m(i, j) = (spd(i, j) >= 0.0 && spd(i, j) <= static_cast<double>(h)) ? 1.0 : 0.0;
  return m;
}

Matrix hop_mask(const Graph& g, int h) { return hop_mask_from_spd(spd_matrix(g), h); }

Matrix graph_kernel(const Graph& g, const KernelSpec& spec) {
  if (spec.param < 0.0) throw std::invalid_argument("graph_kernel: parameter must be nonnegative");
  const Matrix l = normalized_laplacian(g);
  const int n = g.n();
  if (spec.kind == KernelKind::PStepRandomWalk) {
    const int p = static_cast<int>(spec.param);
    if (static_cast<double>(p) != spec.param)
      throw std::invalid_argument("graph_kernel: p-step walk needs an integer step count");
    // gamma = 0.5 keeps gamma * lambda_max <= 1, so the base matrix is PSD
    Matrix base = Matrix::identity(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) base(i, j) -= 0.5 * l(i, j);
    Matrix k = Matrix::identity(n);
    for (int step = 0; step < p; ++step) k = matmul(k, base);
    return k;
  }
  EigResult eig = sym_eig(l);
  Matrix scaled = eig.vectors;
  for (int c = 0; c < n; ++c) {
    const double w = std::exp(-spec.param * eig.values[c]);
    for (int r = 0; r < n; ++r) scaled(r, c) *= w;
  }
  return matmul_nt(scaled, eig.vectors);
}

std::optional<std::vector<std::pair<int, int>>> shortest_path_edges(const Graph& g, int i, int j) {
  if (i < 0 || i >= g.n() || j < 0 || j >= g.n())
    throw std::invalid_argument("shortest_path_edges: node id out of range");
  if (i == j) return std::vector<std::pair<int, int>>{};
  std::vector<int> parent(g.n(), -1);
  std::deque<int> queue{i};
  parent[i] = i;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u == j) break;
    for (int w : g.neighbors(u)) {  // ascending id order = deterministic tie-break
      if (parent[w] >= 0) continue;
      parent[w] = u;
      queue.push_back(w);
    }
  }
  if (parent[j] < 0) return std::nullopt;
  std::vector<std::pair<int, int>> path;
  for (int v = j; v != i; v = parent[v]) path.emplace_back(parent[v], v);
  std::reverse(path.begin(), path.end());
  return path;
}

StructCache StructCache::build(const Graph& g, const StructOptions& opts) {
  StructCache sc;
  auto [indeg, outdeg] = degrees(g);
  sc.indegree = std::move(indeg);
  sc.outdegree = std::move(outdeg);
  sc.degree_matrix = Matrix(g.n(), g.n());
  for (int i = 0; i < g.n(); ++i) sc.degree_matrix(i, i) = sc.outdegree[i];
  if (!g.directed()) sc.laplacian = normalized_laplacian(g);
  sc.spd = spd_matrix(g);
  for (int h = 1; h <= opts.hop_masks; ++h) sc.hop_masks.push_back(hop_mask_from_spd(sc.spd, h));
  if (opts.spectrum) {
    if (!sc.laplacian) throw std::invalid_argument("StructCache: spectrum needs an undirected graph");
    EigResult eig = sym_eig(*sc.laplacian);
    sc.eigenvalues = std::move(eig.values);
    sc.eigenvectors = std::move(eig.vectors);
  }
  if (opts.kernel) {
    sc.kernel = graph_kernel(g, *opts.kernel);
    sc.kernel_spec = opts.kernel;
  }
  return sc;
}

}  // namespace gtx

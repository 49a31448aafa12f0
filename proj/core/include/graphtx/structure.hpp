#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "graphtx/graph.hpp"
#include "graphtx/matrix.hpp"

namespace gtx {

enum class KernelKind { PStepRandomWalk, Diffusion };

struct KernelSpec {
  KernelKind kind = KernelKind::Diffusion;
  double param = 0.5;  // p (nonnegative integer) or beta (nonnegative real)
};

/// (indegree, outdegree); equal row sums for undirected graphs.
std::pair<std::vector<double>, std::vector<double>> degrees(const Graph& g);

/// I - D^{-1/2} A D^{-1/2}; isolated nodes keep diagonal 1. Undirected only.
Matrix normalized_laplacian(const Graph& g);

/// BFS distances per source; diagonal 0; unreachable pairs -1.
Matrix spd_matrix(const Graph& g);

/// Entry (i,j) = 1 iff 0 <= spd(i,j) <= h. Includes self-loops. h >= 1.
Matrix hop_mask_from_spd(const Matrix& spd, int h);
Matrix hop_mask(const Graph& g, int h);

/// p-step random walk kernel (I - 0.5 L)^p, or diffusion kernel
/// U exp(-beta Lambda) U^T via the Laplacian spectrum. Undirected only;
/// negative parameters rejected.
Matrix graph_kernel(const Graph& g, const KernelSpec& spec);

/// One shortest path from i to j as an ordered edge list; BFS expands
/// neighbors in ascending id order so ties resolve deterministically.
/// Empty list when i == j; nullopt when unreachable.
std::optional<std::vector<std::pair<int, int>>> shortest_path_edges(const Graph& g, int i, int j);

struct StructOptions {
  int hop_masks = 1;                  // masks for h = 1..hop_masks
  bool spectrum = false;              // keep the Laplacian eigendecomposition
  std::optional<KernelSpec> kernel;
};

/// Per-graph precomputed structure shared by the attention/PE/GNN builders.
/// Immutable after build; shareable across threads.
struct StructCache {
  std::vector<double> indegree;
  std::vector<double> outdegree;
  Matrix degree_matrix;                     // diag of row sums
  std::optional<Matrix> laplacian;          // undirected only
  std::optional<std::vector<double>> eigenvalues;
  std::optional<Matrix> eigenvectors;
  Matrix spd;                               // integers stored as doubles, -1 unreachable
  std::vector<Matrix> hop_masks;            // hop_masks[h-1] is the h-hop mask
  std::optional<Matrix> kernel;
  std::optional<KernelSpec> kernel_spec;

  static StructCache build(const Graph& g, const StructOptions& opts = {});

  const Matrix& hop(int h) const { return hop_masks.at(static_cast<size_t>(h) - 1); }
};

}  // namespace gtx

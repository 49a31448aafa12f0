#include "graphtx/sample.hpp"

#include <algorithm>
#include <stdexcept>

namespace gtx {

Subgraph induced_subgraph(const Graph& g, std::vector<int> node_ids, int target_original_id) {
  std::sort(node_ids.begin(), node_ids.end());
  node_ids.erase(std::unique(node_ids.begin(), node_ids.end()), node_ids.end());
  const int m = static_cast<int>(node_ids.size());

  std::vector<int> position(g.n(), -1);
  for (int k = 0; k < m; ++k) position[node_ids[k]] = k;
  if (target_original_id < 0 || position[target_original_id] < 0)
    throw std::invalid_argument("induced_subgraph: target node not in the kept set");

  Matrix feats(m, g.node_features().cols());
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < feats.cols(); ++j) feats(k, j) = g.node_features()(node_ids[k], j);

  std::vector<EdgeSpec> edges;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const int oa = node_ids[a], ob = node_ids[b];
      if (!g.has_edge(oa, ob)) continue;
      if (!g.directed() && b < a) continue;
      EdgeSpec e;
      e.src = a;
      e.dst = b;
      if (g.has_edge_features()) e.features = g.edge_feature(oa, ob);
      edges.push_back(std::move(e));
    }
  }

  std::optional<std::vector<double>> labels;
  if (g.node_labels()) {
    labels.emplace(m);
    for (int k = 0; k < m; ++k) (*labels)[k] = (*g.node_labels())[node_ids[k]];
  }

  Subgraph s;
  s.graph = Graph::from_edges(m, g.directed(), edges, std::move(feats), std::move(labels),
                              g.graph_label());
  s.target_index = position[target_original_id];
  s.node_ids = std::move(node_ids);
  return s;
}

Subgraph shadow_khop_sample(const Graph& g, int v, int max_hop, int max_nbrs, Rng& rng) {
  if (v < 0 || v >= g.n()) throw std::invalid_argument("shadow_khop_sample: invalid root node");
  std::vector<bool> visited(g.n(), false);
  visited[v] = true;
  std::vector<int> kept{v};
  std::vector<int> frontier{v};

  for (int hop = 0; hop < max_hop && !frontier.empty(); ++hop) {
    std::vector<int> next;
    for (int u : frontier) {
      std::vector<int> fresh;
      for (int w : g.neighbors(u))
        if (!visited[w]) fresh.push_back(w);
      if (static_cast<int>(fresh.size()) > max_nbrs)
        fresh = rng.sample_without_replacement(std::move(fresh), static_cast<size_t>(max_nbrs));
      for (int w : fresh) {
        visited[w] = true;
        kept.push_back(w);
        next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  return induced_subgraph(g, std::move(kept), v);
}

}  // namespace gtx

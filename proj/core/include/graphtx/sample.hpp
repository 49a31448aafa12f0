#pragma once

#include <vector>

#include "graphtx/graph.hpp"
#include "graphtx/rng.hpp"

namespace gtx {

/// Induced subgraph around a sampled root. node_ids maps subgraph ids
/// (ascending) back to the parent graph.
struct Subgraph {
  std::vector<int> node_ids;
  Graph graph;
  int target_index = 0;
};

/// Bounded-hop, bounded-fanout BFS sampling: frontier expansion up to
/// max_hop; per expanded node, at most max_nbrs NOT-yet-visited neighbors are
/// kept, chosen uniformly without replacement (already-visited neighbors are
/// exempt from the cap). Deterministic for a fixed rng state.
Subgraph shadow_khop_sample(const Graph& g, int v, int max_hop, int max_nbrs, Rng& rng);

/// Induced subgraph on the given original node ids (deduplicated, sorted).
Subgraph induced_subgraph(const Graph& g, std::vector<int> node_ids, int target_original_id);

}  // namespace gtx

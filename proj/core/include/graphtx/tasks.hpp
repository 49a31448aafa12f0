#pragma once

#include <string>
#include <vector>

#include "graphtx/graph.hpp"
#include "graphtx/losses.hpp"
#include "graphtx/metrics.hpp"
#include "graphtx/rng.hpp"

namespace gtx {

enum class TaskLevel { Graph, Node };

TaskLevel task_level_from_string(const std::string& s);
std::string to_string(TaskLevel level);

/// Static description of a synthetic task: where the target lives, which
/// loss/metric apply, and the feature layout the generator emits.
struct TaskSpec {
  std::string name;
  TaskLevel level = TaskLevel::Graph;
  LossKind loss = LossKind::Mae;
  MetricKind metric = MetricKind::Mae;
  int feature_dim = 4;
  int out_dim = 1;
};

/// Known names: node-degree-reg, spd-to-anchor-reg (node-level regression),
/// triangle-count-reg, connectivity-cls, bipartite-cls (graph-level).
/// Throws on unknown names.
TaskSpec task_spec(const std::string& name);
std::vector<std::string> task_names();

/// Max node count the generator emits; also the feature width of the
/// adjacency-row task and the normalizer of degree/distance targets.
constexpr int kTaskMaxNodes = 20;

/// Erdos-Renyi instances, n uniform in [6,20], edge probability uniform in
/// [0.15,0.5]; targets computed by exact combinatorial routines and stored in
/// node_labels / graph_label. A fixed rng state reproduces the dataset.
Dataset gen_task(const std::string& name, int n_instances, Rng& rng);

// exact combinatorial ground-truth routines (also the test oracles)
long triangle_count(const Graph& g);
bool is_connected(const Graph& g);
bool is_bipartite(const Graph& g);

}  // namespace gtx

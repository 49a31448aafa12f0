#include "graphtx/tasks.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "graphtx/structure.hpp"

namespace gtx {

TaskLevel task_level_from_string(const std::string& s) {
  if (s == "graph") return TaskLevel::Graph;
  if (s == "node") return TaskLevel::Node;
  throw std::invalid_argument("unknown task level: " + s);
}

std::string to_string(TaskLevel level) { return level == TaskLevel::Graph ? "graph" : "node"; }

TaskSpec task_spec(const std::string& name) {
  TaskSpec t;
  t.name = name;
  if (name == "node-degree-reg") {
    t.level = TaskLevel::Node;
    t.loss = LossKind::Mae;
    t.metric = MetricKind::Mae;
    t.feature_dim = kTaskMaxNodes;  // adjacency rows
  } else if (name == "spd-to-anchor-reg") {
    t.level = TaskLevel::Node;
    t.loss = LossKind::Mae;
    t.metric = MetricKind::Mae;
  } else if (name == "triangle-count-reg") {
    t.level = TaskLevel::Graph;
    t.loss = LossKind::Mae;
    t.metric = MetricKind::Mae;
  } else if (name == "connectivity-cls" || name == "bipartite-cls") {
    t.level = TaskLevel::Graph;
    t.loss = LossKind::BceLogits;
    t.metric = MetricKind::RocAuc;
  } else {
    throw std::invalid_argument("unknown task: " + name);
  }
  return t;
}

std::vector<std::string> task_names() {
  return {"node-degree-reg", "spd-to-anchor-reg", "triangle-count-reg", "connectivity-cls",
          "bipartite-cls"};
}

long triangle_count(const Graph& g) {
  long count = 0;
  const Matrix& a = g.adjacency();
  for (int i = 0; i < g.n(); ++i)
    for (int j = i + 1; j < g.n(); ++j) {
      if (a(i, j) == 0.0) continue;
      for (int k = j + 1; k < g.n(); ++k)
        if (a(i, k) != 0.0 && a(j, k) != 0.0) ++count;
    }
  return count;
}

bool is_connected(const Graph& g) {
  if (g.n() == 0) return true;
  std::vector<bool> seen(g.n(), false);
  std::deque<int> queue{0};
  seen[0] = true;
  int reached = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int w : g.neighbors(u))
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        queue.push_back(w);
      }
  }
  return reached == g.n();
}

bool is_bipartite(const Graph& g) {
  std::vector<int> color(g.n(), -1);
  for (int s = 0; s < g.n(); ++s) {
    if (color[s] >= 0) continue;
    color[s] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int w : g.neighbors(u)) {
        if (color[w] < 0) {
          color[w] = 1 - color[u];
          queue.push_back(w);
        } else if (color[w] == color[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

namespace {

const double kTriangleNorm = std::log1p(1140.0);  // log1p(C(20,3))

std::vector<EdgeSpec> er_edges(int n, double p, Rng& rng) {
  std::vector<EdgeSpec> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) edges.push_back({i, j, std::nullopt});
  return edges;
}

/// Noise feature block: column 0 task-specific flag, column 1 constant one,
/// columns 2..3 uniform noise (symmetry breaking for attention).
Matrix flag_features(int n, int flag_node, Rng& rng) {
  Matrix f(n, 4);
  for (int i = 0; i < n; ++i) {
    f(i, 0) = i == flag_node ? 1.0 : 0.0;
    f(i, 1) = 1.0;
    f(i, 2) = rng.uniform(-0.5, 0.5);
    f(i, 3) = rng.uniform(-0.5, 0.5);
  }
  return f;
}

}  // namespace

Dataset gen_task(const std::string& name, int n_instances, Rng& rng) {
  const TaskSpec spec = task_spec(name);
  Dataset ds;
  ds.directed = false;
  ds.graphs.reserve(n_instances);

  for (int inst = 0; inst < n_instances; ++inst) {
    const int n = 6 + static_cast<int>(rng.below(kTaskMaxNodes - 6 + 1));
    const double p = rng.uniform(0.15, 0.5);
    auto edges = er_edges(n, p, rng);

    if (name == "node-degree-reg") {
      // features are zero-padded adjacency rows, so the target is a linear
      // readout; this is the learning-sanity task
      Graph bare = Graph::from_edges(n, false, edges, Matrix(n, 1));
      Matrix feats(n, kTaskMaxNodes);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) feats(i, j) = bare.adjacency()(i, j);
      std::vector<double> targets(n);
      auto [indeg, outdeg] = degrees(bare);
      (void)outdeg;
      for (int i = 0; i < n; ++i) targets[i] = indeg[i] / static_cast<double>(kTaskMaxNodes - 1);
      ds.graphs.push_back(Graph::from_edges(n, false, edges, feats, targets));
    } else if (name == "spd-to-anchor-reg") {
      Matrix feats = flag_features(n, 0, rng);  // node 0 is the anchor
      Graph bare = Graph::from_edges(n, false, edges, Matrix(n, 1));
      Matrix spd = spd_matrix(bare);
      std::vector<double> targets(n);
      for (int i = 0; i < n; ++i) {
        const double d = spd(i, 0) < 0.0 ? static_cast<double>(n) : spd(i, 0);
        targets[i] = d / static_cast<double>(kTaskMaxNodes);
      }
      ds.graphs.push_back(Graph::from_edges(n, false, edges, feats, targets));
    } else if (name == "triangle-count-reg") {
      Matrix feats = flag_features(n, -1, rng);
      Graph g = Graph::from_edges(n, false, edges, feats);
      g.set_graph_label(std::log1p(static_cast<double>(triangle_count(g))) / kTriangleNorm);
      ds.graphs.push_back(std::move(g));
    } else if (name == "connectivity-cls") {
      Matrix feats = flag_features(n, -1, rng);
      Graph g = Graph::from_edges(n, false, edges, feats);
      g.set_graph_label(is_connected(g) ? 1.0 : 0.0);
      ds.graphs.push_back(std::move(g));
    } else {  // bipartite-cls
      Matrix feats = flag_features(n, -1, rng);
      Graph g = Graph::from_edges(n, false, edges, feats);
      g.set_graph_label(is_bipartite(g) ? 1.0 : 0.0);
      ds.graphs.push_back(std::move(g));
    }
  }
  return ds;
}

}  // namespace gtx

#include "graphtx/graph.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gtx {

using nlohmann::json;

Graph Graph::from_edges(int num_nodes, bool directed, const std::vector<EdgeSpec>& edges,
                        Matrix node_features, std::optional<std::vector<double>> node_labels,
                        std::optional<double> graph_label) {
  if (num_nodes < 0) throw ParseError(ParseErrorKind::Malformed, "num_nodes must be >= 0");
  if (node_features.rows() != num_nodes)
    throw ParseError(ParseErrorKind::Malformed,
                     "node_features rows (" + std::to_string(node_features.rows()) +
                         ") != num_nodes (" + std::to_string(num_nodes) + ")");
  if (!node_features.all_finite())
    throw ParseError(ParseErrorKind::Malformed, "node_features contain non-finite values");
  if (node_labels && static_cast<int>(node_labels->size()) != num_nodes)
    throw ParseError(ParseErrorKind::Malformed, "node_labels length != num_nodes");

  Graph g;
  g.n_ = num_nodes;
  g.directed_ = directed;
  g.adjacency_ = Matrix(num_nodes, num_nodes);
  g.node_features_ = std::move(node_features);
  g.node_labels_ = std::move(node_labels);
  g.graph_label_ = graph_label;

  size_t with_features = 0;
  int feature_dim = -1;
  for (const auto& e : edges) {
    if (e.src < 0 || e.src >= num_nodes || e.dst < 0 || e.dst >= num_nodes)
      throw ParseError(ParseErrorKind::UnknownNode,
                       "edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                           ") references a node outside [0," + std::to_string(num_nodes) + ")");
    if (e.src == e.dst)
      throw ParseError(ParseErrorKind::Malformed,
                       "self-loop at node " + std::to_string(e.src) + " is not representable");
    if (e.features) {
      ++with_features;
      if (feature_dim < 0) feature_dim = static_cast<int>(e.features->size());
      if (static_cast<int>(e.features->size()) != feature_dim)
        throw ParseError(ParseErrorKind::Malformed, "edge feature vectors have mixed dimensions");
      for (double v : *e.features)
        if (!std::isfinite(v))
          throw ParseError(ParseErrorKind::Malformed, "edge features contain non-finite values");
    }

    auto key = std::make_pair(e.src, e.dst);
    if (g.adjacency_(e.src, e.dst) != 0.0) {
      // duplicate edge record: tolerated if it carries no contradiction
      auto it = g.edge_features_.find(key);
      const bool had = it != g.edge_features_.end();
      if (had != static_cast<bool>(e.features) || (had && *e.features != it->second)) {
        if (!directed)
          throw ParseError(ParseErrorKind::AsymmetricUndirected,
                           "undirected edge (" + std::to_string(e.src) + "," +
                               std::to_string(e.dst) + ") listed with conflicting features");
        throw ParseError(ParseErrorKind::Malformed, "conflicting duplicate directed edge");
      }
      continue;
    }
    g.adjacency_(e.src, e.dst) = 1.0;
    if (e.features) g.edge_features_[key] = *e.features;
    if (!directed) {
      g.adjacency_(e.dst, e.src) = 1.0;
      if (e.features) g.edge_features_[std::make_pair(e.dst, e.src)] = *e.features;
    }
  }

  if (with_features != 0 && with_features != edges.size())
    throw ParseError(ParseErrorKind::Malformed,
                     "either every edge carries a feature vector or none does");
  return g;
}

int Graph::edge_feature_dim() const {
  if (edge_features_.empty()) return 0;
  return static_cast<int>(edge_features_.begin()->second.size());
}

const std::vector<double>& Graph::edge_feature(int i, int j) const {
  auto it = edge_features_.find(std::make_pair(i, j));
  if (it == edge_features_.end())
    throw std::out_of_range("edge_feature: no feature stored for (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
  return it->second;
}

std::vector<int> Graph::neighbors(int v) const {
  std::vector<int> out;
  for (int j = 0; j < n_; ++j)
    if (adjacency_(v, j) != 0.0) out.push_back(j);
  return out;
}

std::vector<int> Graph::in_neighbors(int v) const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if (adjacency_(i, v) != 0.0) out.push_back(i);
  return out;
}

std::vector<std::pair<int, int>> Graph::edge_list() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      if (adjacency_(i, j) == 0.0) continue;
      if (!directed_ && j < i) continue;
      out.emplace_back(i, j);
    }
  return out;
}

namespace {

json matrix_rows_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Graph graph_from_json(const json& jg, bool directed) {
  if (!jg.is_object()) throw ParseError(ParseErrorKind::Malformed, "graph entry is not an object");
  if (!jg.contains("num_nodes") || !jg["num_nodes"].is_number_integer())
    throw ParseError(ParseErrorKind::Malformed, "graph entry missing integer num_nodes");
  const int n = jg["num_nodes"].get<int>();

  std::vector<EdgeSpec> edges;
  if (jg.contains("edges")) {
    if (!jg["edges"].is_array()) throw ParseError(ParseErrorKind::Malformed, "edges must be a list");
    for (const auto& je : jg["edges"]) {
      if (!je.is_array() || je.size() < 2 || je.size() > 3 || !je[0].is_number_integer() ||
          !je[1].is_number_integer())
        throw ParseError(ParseErrorKind::Malformed, "edge record must be [src, dst] or [src, dst, feats]");
      EdgeSpec e;
      e.src = je[0].get<int>();
      e.dst = je[1].get<int>();
      if (je.size() == 3) {
        if (!je[2].is_array()) throw ParseError(ParseErrorKind::Malformed, "edge features must be a list");
        e.features = je[2].get<std::vector<double>>();
      }
      edges.push_back(std::move(e));
    }
  }

  if (!jg.contains("node_features") || !jg["node_features"].is_array())
    throw ParseError(ParseErrorKind::Malformed, "graph entry missing node_features list");
  const auto& jf = jg["node_features"];
  if (static_cast<int>(jf.size()) != n)
    throw ParseError(ParseErrorKind::Malformed, "node_features length != num_nodes");
  const int d = n > 0 ? static_cast<int>(jf[0].size()) : 0;
  Matrix feats(n, d);
  for (int i = 0; i < n; ++i) {
    if (!jf[i].is_array() || static_cast<int>(jf[i].size()) != d)
      throw ParseError(ParseErrorKind::Malformed, "node_features rows have mixed dimensions");
    for (int j = 0; j < d; ++j) {
      if (!jf[i][j].is_number())
        throw ParseError(ParseErrorKind::Malformed, "node feature entry is not a number");
      feats(i, j) = jf[i][j].get<double>();
    }
  }

  std::optional<std::vector<double>> labels;
  if (jg.contains("node_labels")) {
    if (!jg["node_labels"].is_array())
      throw ParseError(ParseErrorKind::Malformed, "node_labels must be a list");
    labels = jg["node_labels"].get<std::vector<double>>();
  }
  std::optional<double> glabel;
  if (jg.contains("graph_label")) {
    if (!jg["graph_label"].is_number())
      throw ParseError(ParseErrorKind::Malformed, "graph_label must be a number");
    glabel = jg["graph_label"].get<double>();
  }

  return Graph::from_edges(n, directed, edges, std::move(feats), std::move(labels), glabel);
}

}  // namespace

Dataset parse_dataset(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(ParseErrorKind::Malformed, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("directed") || !doc["directed"].is_boolean() ||
      !doc.contains("graphs") || !doc["graphs"].is_array())
    throw ParseError(ParseErrorKind::Malformed,
                     "document must be {directed: bool, graphs: [...]}");
  Dataset ds;
  ds.directed = doc["directed"].get<bool>();
  for (const auto& jg : doc["graphs"]) ds.graphs.push_back(graph_from_json(jg, ds.directed));
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::Malformed, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str());
}

std::string serialize_dataset(const Dataset& ds) {
  json doc;
  doc["directed"] = ds.directed;
  json graphs = json::array();
  for (const Graph& g : ds.graphs) {
    json jg;
    jg["num_nodes"] = g.n();
    json edges = json::array();
    for (auto [i, j] : g.edge_list()) {
      json je = json::array({i, j});
      if (g.has_edge_features()) je.push_back(g.edge_feature(i, j));
      edges.push_back(std::move(je));
    }
    jg["edges"] = std::move(edges);
    jg["node_features"] = matrix_rows_to_json(g.node_features());
    if (g.node_labels()) jg["node_labels"] = *g.node_labels();
    if (g.graph_label()) jg["graph_label"] = *g.graph_label();
    graphs.push_back(std::move(jg));
  }
  doc["graphs"] = std::move(graphs);
  return doc.dump(1);
}

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize_dataset(ds) << "\n";
}

}  // namespace gtx

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphtx/matrix.hpp"

namespace gtx {

/// Distinct parse-failure classes for dataset files.
enum class ParseErrorKind { Malformed, UnknownNode, AsymmetricUndirected };

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ParseErrorKind kind() const { return kind_; }

 private:
  ParseErrorKind kind_;
};

struct EdgeSpec {
  int src = 0;
  int dst = 0;
  std::optional<std::vector<double>> features;
};

/// A graph with dense 0/1 adjacency, inline node features, and optional
/// per-edge feature vectors. Undirected graphs store symmetric adjacency and
/// mirrored edge features; self-loops are never stored (consumers add them
/// where a mechanism calls for it).
class Graph {
 public:
  Graph() = default;

  /// Validating constructor from an edge list. Throws ParseError on invalid
  /// input (the same validation path serves file ingestion and generators).
  static Graph from_edges(int num_nodes, bool directed, const std::vector<EdgeSpec>& edges,
                          Matrix node_features,
                          std::optional<std::vector<double>> node_labels = std::nullopt,
                          std::optional<double> graph_label = std::nullopt);

  int n() const { return n_; }
  bool directed() const { return directed_; }
  const Matrix& adjacency() const { return adjacency_; }
  const Matrix& node_features() const { return node_features_; }
  bool has_edge(int i, int j) const { return adjacency_(i, j) != 0.0; }

  bool has_edge_features() const { return !edge_features_.empty(); }
  int edge_feature_dim() const;
  /// Defined exactly on the (directed) edge set; mirrored for undirected.
  const std::vector<double>& edge_feature(int i, int j) const;
  const std::map<std::pair<int, int>, std::vector<double>>& edge_features() const {
    return edge_features_;
  }

  const std::optional<std::vector<double>>& node_labels() const { return node_labels_; }
  const std::optional<double>& graph_label() const { return graph_label_; }
  void set_node_labels(std::vector<double> v) { node_labels_ = std::move(v); }
  void set_graph_label(double v) { graph_label_ = v; }

  /// Neighbors by ascending id; out-neighbors for directed graphs.
  std::vector<int> neighbors(int v) const;
  std::vector<int> in_neighbors(int v) const;

  /// Undirected edge list (i < j) or directed edge list, ascending.
  std::vector<std::pair<int, int>> edge_list() const;

 private:
  int n_ = 0;
  bool directed_ = false;
  Matrix adjacency_;
  Matrix node_features_;
  std::map<std::pair<int, int>, std::vector<double>> edge_features_;
  std::optional<std::vector<double>> node_labels_;
  std::optional<double> graph_label_;
};

struct Dataset {
  bool directed = false;
  std::vector<Graph> graphs;
};

/// Reads the dataset JSON document described in the README. Throws ParseError
/// with a kind that distinguishes malformed records, edges referencing
/// unknown nodes, and asymmetric undirected input.
Dataset load_dataset(const std::string& path);
Dataset parse_dataset(const std::string& text);

/// Writes the same format; feature round-trips are exact (shortest-round-trip
/// float printing).
void save_dataset(const std::string& path, const Dataset& ds);
std::string serialize_dataset(const Dataset& ds);

}  // namespace gtx

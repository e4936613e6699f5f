#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wkpi {

/// Undirected edge stored with `u < v`.
struct Edge {
  int u = 0;
  int v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph. Construction canonicalizes the edge list: each
/// edge is stored once as (min, max), the list is sorted, self-loops and
/// duplicates are dropped (their number is kept in dropped_edge_count()).
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t node_count, std::span<const std::pair<int, int>> edges);
  Graph(std::size_t node_count, std::initializer_list<std::pair<int, int>> edges);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }

  /// Sorted open neighbourhood of `v`.
  std::span<const int> neighbors(int v) const;
  std::size_t degree(int v) const { return neighbors(v).size(); }

  /// Indices of the edges incident to `v`, in the same order as neighbors(v).
  std::span<const int> incident_edges(int v) const;

  std::optional<std::size_t> edge_index(int u, int v) const;
  bool has_edge(int u, int v) const { return edge_index(u, v).has_value(); }

  /// Number of self-loops and duplicate edges removed during construction.
  std::size_t dropped_edge_count() const { return dropped_; }

  /// Component id per node (0-based, numbered by smallest node).
  std::vector<int> component_labels() const;
  std::size_t component_count() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
  }

 private:
  void build(std::size_t node_count, std::span<const std::pair<int, int>> edges);

  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::size_t dropped_ = 0;
  // CSR adjacency.
  std::vector<std::size_t> offsets_;
  std::vector<int> adjacency_;
  std::vector<int> adjacency_edge_;
};

enum class DescriptorKind { node, edge };

/// A real value per node or per edge of one graph.
struct DescriptorValues {
  DescriptorKind kind = DescriptorKind::node;
  std::vector<double> values;
};

/// Filtration values for every simplex of a graph.
struct SimplexValues {
  std::vector<double> node;
  std::vector<double> edge;
};

/// Labelled collection of graphs with class ids in {0..class_count-1}.
struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  std::vector<int> labels;
  int class_count = 0;
  /// Raw label value for each class id (sorted ascending).
  std::vector<long long> raw_labels;
  /// Per-graph node labels when NAME_node_labels.txt exists; unused by the pipeline.
  std::vector<std::vector<long long>> node_labels;

  std::size_t size() const { return graphs.size(); }
  /// Throws InvalidArgument when sizes or ids are inconsistent.
  void validate() const;
};

struct RicciConfig {
  /// Mass kept at the node itself by the lazy random walk measure.
  double laziness = 0.5;
};

}  // namespace wkpi

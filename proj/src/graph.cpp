#include "wkpi/graph.hpp"

#include <algorithm>
#include <numeric>

#include "wkpi/error.hpp"
#include "wkpi/union_find.hpp"

namespace wkpi {

Graph::Graph(std::size_t node_count, std::span<const std::pair<int, int>> edges) {
  build(node_count, edges);
}

Graph::Graph(std::size_t node_count, std::initializer_list<std::pair<int, int>> edges) {
  build(node_count, std::span<const std::pair<int, int>>(edges.begin(), edges.size()));
}

void Graph::build(std::size_t node_count, std::span<const std::pair<int, int>> edges) {
  node_count_ = node_count;
  edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= node_count ||
        static_cast<std::size_t>(b) >= node_count) {
      throw InvalidArgument("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") references a node outside [0, " + std::to_string(node_count) + ")");
    }
    if (a == b) {
      ++dropped_;
      continue;
    }
    edges_.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges_.begin(), edges_.end());
  const auto last = std::unique(edges_.begin(), edges_.end());
  dropped_ += static_cast<std::size_t>(edges_.end() - last);
  edges_.erase(last, edges_.end());

  std::vector<std::size_t> degree(node_count, 0);
  for (const auto& e : edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  offsets_.assign(node_count + 1, 0);
  for (std::size_t v = 0; v < node_count; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adjacency_.assign(offsets_.back(), 0);
  adjacency_edge_.assign(offsets_.back(), 0);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    adjacency_[cursor[e.u]] = e.v;
    adjacency_edge_[cursor[e.u]++] = static_cast<int>(i);
    adjacency_[cursor[e.v]] = e.u;
    adjacency_edge_[cursor[e.v]++] = static_cast<int>(i);
  }
  // Edges are sorted by (u, v), so the neighbours of each node come out
  // partly ordered; sort each row together with its edge ids.
  for (std::size_t v = 0; v < node_count; ++v) {
    const auto begin = offsets_[v];
    const auto end = offsets_[v + 1];
    std::vector<std::pair<int, int>> row;
    row.reserve(end - begin);
    for (auto k = begin; k < end; ++k) row.emplace_back(adjacency_[k], adjacency_edge_[k]);
    std::sort(row.begin(), row.end());
    for (auto k = begin; k < end; ++k) {
      adjacency_[k] = row[k - begin].first;
      adjacency_edge_[k] = row[k - begin].second;
    }
  }
}

std::span<const int> Graph::neighbors(int v) const {
  const auto begin = offsets_[static_cast<std::size_t>(v)];
  const auto end = offsets_[static_cast<std::size_t>(v) + 1];
  return {adjacency_.data() + begin, end - begin};
}

std::span<const int> Graph::incident_edges(int v) const {
  const auto begin = offsets_[static_cast<std::size_t>(v)];
  const auto end = offsets_[static_cast<std::size_t>(v) + 1];
  return {adjacency_edge_.data() + begin, end - begin};
}

std::optional<std::size_t> Graph::edge_index(int u, int v) const {
  if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= node_count_ ||
      static_cast<std::size_t>(v) >= node_count_) {
    return std::nullopt;
  }
  const auto nbrs = neighbors(u);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
  if (it == nbrs.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(incident_edges(u)[static_cast<std::size_t>(it - nbrs.begin())]);
}

std::vector<int> Graph::component_labels() const {
  UnionFind uf(node_count_);
  for (const auto& e : edges_) uf.unite(e.u, e.v);
  std::vector<int> label(node_count_, -1);
  std::vector<int> root_label(node_count_, -1);
  int next = 0;
  for (std::size_t v = 0; v < node_count_; ++v) {
    const auto r = uf.find(v);
    if (root_label[r] < 0) root_label[r] = next++;
    label[v] = root_label[r];
  }
  return label;
}

std::size_t Graph::component_count() const {
  const auto labels = component_labels();
  return labels.empty() ? 0 : static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end()) + 1);
}

void Dataset::validate() const {
  if (labels.size() != graphs.size()) {
    throw InvalidArgument("dataset '" + name + "': " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(graphs.size()) + " graphs");
  }
  if (class_count < 1) throw InvalidArgument("dataset '" + name + "': no classes");
  for (const int y : labels) {
    if (y < 0 || y >= class_count) {
      throw InvalidArgument("dataset '" + name + "': class id " + std::to_string(y) + " out of range");
    }
  }
}

}  // namespace wkpi

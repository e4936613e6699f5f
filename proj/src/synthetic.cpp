#include "wkpi/synthetic.hpp"

#include <queue>
#include <utility>
#include <vector>

#include "wkpi/error.hpp"
#include "wkpi/random.hpp"

namespace wkpi {

Graph cycle_graph(std::size_t n) {
  if (n < 3) throw InvalidArgument("a cycle needs at least 3 nodes");
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < n; ++i) edges.emplace_back(static_cast<int>(i), static_cast<int>((i + 1) % n));
  return Graph(n, edges);
}

Graph random_tree(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("a tree needs at least one node");
  if (n == 1) return Graph(1, std::span<const std::pair<int, int>>{});
  if (n == 2) return Graph(2, {{0, 1}});
  Rng rng(seed);
  std::vector<int> code(n - 2);
  for (auto& c : code) c = static_cast<int>(uniform_index(rng, n));
  std::vector<int> degree(n, 1);
  for (int c : code) ++degree[static_cast<std::size_t>(c)];
  std::priority_queue<int, std::vector<int>, std::greater<>> leaves;
  for (std::size_t v = 0; v < n; ++v) {
    if (degree[v] == 1) leaves.push(static_cast<int>(v));
  }
  std::vector<std::pair<int, int>> edges;
  for (int c : code) {
    const int leaf = leaves.top();
    leaves.pop();
    edges.emplace_back(leaf, c);
    if (--degree[static_cast<std::size_t>(c)] == 1) leaves.push(c);
  }
  const int u = leaves.top();
  leaves.pop();
  edges.emplace_back(u, leaves.top());
  return Graph(n, edges);
}

Dataset cycles_vs_trees(std::size_t per_class, std::size_t min_nodes, std::size_t max_nodes, std::uint64_t seed) {
  if (min_nodes < 3 || max_nodes < min_nodes) throw InvalidArgument("invalid node count range");
  Rng rng = make_rng(seed, "synthetic-sizes");
  Dataset data;
  data.name = "cycles_vs_trees";
  data.class_count = 2;
  data.raw_labels = {0, 1};
  const std::size_t span = max_nodes - min_nodes + 1;
  for (std::size_t i = 0; i < per_class; ++i) {
    data.graphs.push_back(cycle_graph(min_nodes + uniform_index(rng, span)));
    data.labels.push_back(0);
  }
  for (std::size_t i = 0; i < per_class; ++i) {
    data.graphs.push_back(random_tree(min_nodes + uniform_index(rng, span), derive_seed(seed, "synthetic-tree", i)));
    data.labels.push_back(1);
  }
  return data;
}

}  // namespace wkpi

#include "wkpi/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "wkpi/error.hpp"
#include "wkpi/transport.hpp"

namespace wkpi {
namespace {

void check_finite(const DescriptorValues& f) {
  for (const double x : f.values) {
    if (!std::isfinite(x)) throw InvalidArgument("descriptor contains a non-finite value");
  }
}

std::string edge_name(const Edge& e) {
  return "(" + std::to_string(e.u) + ", " + std::to_string(e.v) + ")";
}

// Hop distances from `source`, explored up to `max_depth`. Unreached nodes are -1.
void bounded_bfs(const Graph& g, int source, int max_depth, std::vector<int>& dist, std::vector<int>& touched) {
  for (const int v : touched) dist[static_cast<std::size_t>(v)] = -1;
  touched.clear();
  std::queue<int> frontier;
  dist[static_cast<std::size_t>(source)] = 0;
  touched.push_back(source);
  frontier.push(source);
  while (!frontier.empty()) {
    const int x = frontier.front();
    frontier.pop();
    const int dx = dist[static_cast<std::size_t>(x)];
    if (dx == max_depth) continue;
    for (const int y : g.neighbors(x)) {
      if (dist[static_cast<std::size_t>(y)] < 0) {
        dist[static_cast<std::size_t>(y)] = dx + 1;
        touched.push_back(y);
        frontier.push(y);
      }
    }
  }
}

}  // namespace

DescriptorValues degree_function(const Graph& g) {
  DescriptorValues f{DescriptorKind::node, std::vector<double>(g.node_count())};
  for (std::size_t v = 0; v < g.node_count(); ++v) f.values[v] = static_cast<double>(g.degree(static_cast<int>(v)));
  return f;
}

DescriptorValues jaccard_index(const Graph& g) {
  DescriptorValues f{DescriptorKind::edge, std::vector<double>(g.edge_count())};
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edge(k);
    const auto a = g.neighbors(e.u);
    const auto b = g.neighbors(e.v);
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        ++common;
        ++ia;
        ++ib;
      }
    }
    const std::size_t united = a.size() + b.size() - common;
    f.values[k] = static_cast<double>(common) / static_cast<double>(united);
  }
  return f;
}

DescriptorValues ricci_curvature(const Graph& g, const RicciConfig& cfg) {
  if (!(cfg.laziness >= 0.0 && cfg.laziness <= 1.0)) {
    throw InvalidArgument("ricci laziness must lie in [0, 1]");
  }
  DescriptorValues f{DescriptorKind::edge, std::vector<double>(g.edge_count())};
  std::vector<int> dist(g.node_count(), -1);
  std::vector<int> touched;

  auto measure = [&](int x) {
    std::map<int, double> m;
    const auto nbrs = g.neighbors(x);
    m[x] += cfg.laziness;
    const double share = (1.0 - cfg.laziness) / static_cast<double>(nbrs.size());
    for (const int y : nbrs) m[y] += share;
    return m;
  };

  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edge(k);
    const auto mu = measure(e.u);
    const auto mv = measure(e.v);
    // Mass shared by both measures stays in place in some optimal plan, so
    // only the net surplus and deficit need to be transported.
    std::vector<int> src_nodes;
    std::vector<int> dst_nodes;
    std::vector<double> supply;
    std::vector<double> demand;
    std::map<int, double> net;
    for (const auto& [x, w] : mu) net[x] += w;
    for (const auto& [x, w] : mv) net[x] -= w;
    for (const auto& [x, w] : net) {
      if (w > 0.0) {
        src_nodes.push_back(x);
        supply.push_back(w);
      } else if (w < 0.0) {
        dst_nodes.push_back(x);
        demand.push_back(-w);
      }
    }
    double w1 = 0.0;
    if (!src_nodes.empty() && !dst_nodes.empty()) {
      // Supports lie within one hop of u or v, so any two are at most 3 apart.
      std::vector<double> cost(src_nodes.size() * dst_nodes.size());
      for (std::size_t i = 0; i < src_nodes.size(); ++i) {
        bounded_bfs(g, src_nodes[i], 3, dist, touched);
        for (std::size_t j = 0; j < dst_nodes.size(); ++j) {
          const int d = dist[static_cast<std::size_t>(dst_nodes[j])];
          if (d < 0) throw NumericalError("ricci: disconnected supports on edge " + edge_name(e));
          cost[i * dst_nodes.size() + j] = static_cast<double>(d);
        }
      }
      // Rebalance tiny rounding differences between the two totals.
      double s = 0.0;
      double t = 0.0;
      for (const double x : supply) s += x;
      for (const double x : demand) t += x;
      demand.back() += s - t;
      w1 = min_cost_transport(supply, demand, cost);
    }
    f.values[k] = 1.0 - w1;  // d(u, v) = 1 for an edge
  }
  for (const int v : touched) dist[static_cast<std::size_t>(v)] = -1;
  return f;
}

SimplexValues extend_node_to_edge(const Graph& g, const DescriptorValues& f) {
  if (f.kind != DescriptorKind::node) throw InvalidArgument("extend_node_to_edge needs a node-valued descriptor");
  if (f.values.size() != g.node_count()) throw InvalidArgument("descriptor length does not match node count");
  check_finite(f);
  SimplexValues out{f.values, std::vector<double>(g.edge_count())};
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edge(k);
    out.edge[k] = std::max(f.values[static_cast<std::size_t>(e.u)], f.values[static_cast<std::size_t>(e.v)]);
  }
  return out;
}

SimplexValues extend_edge_to_node(const Graph& g, const DescriptorValues& f) {
  if (f.kind != DescriptorKind::edge) throw InvalidArgument("extend_edge_to_node needs an edge-valued descriptor");
  if (f.values.size() != g.edge_count()) throw InvalidArgument("descriptor length does not match edge count");
  if (g.edge_count() == 0 && g.node_count() > 0) {
    throw InvalidArgument("edge-valued descriptor on a graph without edges");
  }
  check_finite(f);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  SimplexValues out{std::vector<double>(g.node_count(), kInf), f.values};
  double global_min = kInf;
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edge(k);
    const double x = f.values[k];
    global_min = std::min(global_min, x);
    auto& a = out.node[static_cast<std::size_t>(e.u)];
    auto& b = out.node[static_cast<std::size_t>(e.v)];
    a = std::min(a, x);
    b = std::min(b, x);
  }
  for (auto& x : out.node) {
    if (x == kInf) x = global_min;
  }
  return out;
}

SimplexValues extend_to_simplices(const Graph& g, const DescriptorValues& f) {
  return f.kind == DescriptorKind::node ? extend_node_to_edge(g, f) : extend_edge_to_node(g, f);
}

}  // namespace wkpi

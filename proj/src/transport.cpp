#include "wkpi/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wkpi/error.hpp"

namespace wkpi {

double min_cost_transport(std::span<const double> supply, std::span<const double> demand,
                          std::span<const double> cost, std::vector<double>* plan) {
  const std::size_t p = supply.size();
  const std::size_t q = demand.size();
  if (cost.size() != p * q) throw InvalidArgument("transport cost matrix has the wrong size");
  const double total_supply = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
  const double scale = std::max({1.0, total_supply, total_demand});
  if (std::abs(total_supply - total_demand) > 1e-9 * scale) {
    throw InvalidArgument("transport: supply and demand totals differ");
  }
  const double eps = 1e-13 * scale;

  // Node layout: sources [0, p), sinks [p, p + q), super source S, super sink T.
  const std::size_t n = p + q + 2;
  const std::size_t S = p + q;
  const std::size_t T = p + q + 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> flow(p * q, 0.0);
  std::vector<double> left_supply(supply.begin(), supply.end());
  std::vector<double> left_demand(demand.begin(), demand.end());
  std::vector<double> potential(n, 0.0);
  std::vector<double> dist(n);
  std::vector<std::size_t> prev(n);
  std::vector<char> done(n);

  // Reduced arc cost u -> v given the raw cost.
  auto relax = [&](std::size_t u, std::size_t v, double raw) {
    const double d = dist[u] + raw + potential[u] - potential[v];
    if (d < dist[v] - 1e-15 * std::max(1.0, std::abs(d))) {
      dist[v] = d;
      prev[v] = u;
    }
  };

  double remaining = total_supply;
  while (remaining > eps) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    dist[S] = 0.0;
    // Dense Dijkstra over the residual graph.
    for (;;) {
      std::size_t u = n;
      double best = kInf;
      for (std::size_t v = 0; v < n; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == n || u == T) break;
      done[u] = 1;
      if (u == S) {
        for (std::size_t i = 0; i < p; ++i) {
          if (left_supply[i] > eps) relax(S, i, 0.0);
        }
      } else if (u < p) {
        for (std::size_t j = 0; j < q; ++j) relax(u, p + j, cost[u * q + j]);
        if (left_supply[u] < supply[u] - eps) relax(u, S, 0.0);
      } else {
        const std::size_t j = u - p;
        for (std::size_t i = 0; i < p; ++i) {
          if (flow[i * q + j] > eps) relax(u, i, -cost[i * q + j]);
        }
        if (left_demand[j] > eps) relax(u, T, 0.0);
      }
    }
    if (!(dist[T] < kInf)) throw NumericalError("transport: no augmenting path left");
    // Nodes settled after T (or never reached) are capped at dist[T], which
    // keeps every residual reduced cost non-negative.
    for (std::size_t v = 0; v < n; ++v) potential[v] += std::min(dist[v], dist[T]);

    // Bottleneck along S -> ... -> T.
    double amount = kInf;
    for (std::size_t v = T; v != S; v = prev[v]) {
      const std::size_t u = prev[v];
      if (u == S) {
        amount = std::min(amount, left_supply[v]);
      } else if (v == T) {
        amount = std::min(amount, left_demand[u - p]);
      } else if (u >= p && v < p) {
        amount = std::min(amount, flow[v * q + (u - p)]);
      }
    }
    for (std::size_t v = T; v != S; v = prev[v]) {
      const std::size_t u = prev[v];
      if (u == S) {
        left_supply[v] -= amount;
      } else if (v == T) {
        left_demand[u - p] -= amount;
      } else if (u < p && v >= p) {
        flow[u * q + (v - p)] += amount;
      } else if (u >= p && v < p) {
        flow[v * q + (u - p)] -= amount;
      } else if (v == S) {
        left_supply[u] += amount;
      }
    }
    remaining -= amount;
  }

  double total = 0.0;
  for (std::size_t k = 0; k < flow.size(); ++k) total += flow[k] * cost[k];
  if (plan != nullptr) *plan = std::move(flow);
  return total;
}

}  // namespace wkpi

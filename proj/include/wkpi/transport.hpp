#pragma once

#include <span>
#include <vector>

namespace wkpi {

/// Exact optimal transport between two discrete measures with equal total
/// mass, solved as a min-cost flow (successive shortest paths).
/// `cost` is row-major, supply.size() x demand.size(), non-negative.
/// Returns the minimal total cost; the optimal plan is written to `plan`
/// (same layout as `cost`) when it is non-null.
double min_cost_transport(std::span<const double> supply, std::span<const double> demand,
                          std::span<const double> cost, std::vector<double>* plan = nullptr);

}  // namespace wkpi

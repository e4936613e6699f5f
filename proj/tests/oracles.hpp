#pragma once

// Independent reference implementations used only by the tests.

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wkpi/graph.hpp"
#include "wkpi/pimage.hpp"
#include "wkpi/random.hpp"

namespace oracle {

/// Erdos-Renyi graph G(n, p).
wkpi::Graph random_graph(std::size_t n, double p, wkpi::Rng& rng);

/// Random integer-valued node descriptor in [0, levels), as doubles, so ties occur.
wkpi::DescriptorValues random_node_values(const wkpi::Graph& g, int levels, wkpi::Rng& rng);

/// Minimum-cost perfect assignment on a square matrix (Hungarian method).
double assignment_cost(const std::vector<std::vector<double>>& cost);

/// Ollivier-Ricci curvature of edge (u, v) with laziness num/den, by splitting
/// both lazy-walk measures into equal atoms and solving the assignment.
double ricci_by_atoms(const wkpi::Graph& g, int u, int v, int num, int den);

/// Finite (birth < death) 0-dimensional pairs of the sublevel filtration,
/// from a dense Z/2 reduction of the boundary matrix, sorted.
std::vector<std::pair<double, double>> zero_dim_pairs_by_reduction(const wkpi::Graph& g,
                                                                   const wkpi::SimplexValues& values);

/// |E| - |V| + #components via depth-first search.
long cycle_rank(const wkpi::Graph& g);

/// Maximizer of sum(a) - a^T Q a / 2 subject to 0 <= a <= C, y^T a = 0, by
/// accelerated projected gradient; the projection solves for the multiplier
/// of the equality constraint by bisection.
Eigen::VectorXd svm_dual_by_projected_gradient(const Eigen::MatrixXd& gram, const std::vector<int>& y, double C,
                                               int iterations = 20000);
double svm_dual_value(const Eigen::MatrixXd& gram, const std::vector<int>& y, const Eigen::VectorXd& alpha);

/// Monte-Carlo estimate of the mass of N((cx, cy), tau^2 I) inside each
/// pixel of `grid`, and the standard error of each estimate.
struct MonteCarloImage {
  std::vector<double> mass;
  std::vector<double> standard_error;
};
MonteCarloImage monte_carlo_image(double cx, double cy, double tau, const wkpi::GridSpec& grid, std::size_t samples,
                                  std::uint64_t seed);

}  // namespace oracle

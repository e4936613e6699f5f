#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wkpi/kernel.hpp"

namespace wkpi {

/// Matrices of the trace form of the total cost. lambda holds squared
/// WKPI distances, g its row sums on the diagonal, l = g - lambda, and h is
/// k x n with h(t, i) = 1 / sqrt(cost(t, .)) for i in class t.
struct CostMatrices {
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd g;
  Eigen::MatrixXd l;
  Eigen::MatrixXd h;
};

/// Checks n >= 2, labels in [0, class_count) and every class non-empty.
void validate_labels(std::span<const int> labels, int class_count);

/// Throws DegenerateClassError when some class has zero cost to the data.
CostMatrices build_cost_matrices(std::span<const PersistenceImage> images, std::span<const int> labels,
                                 int class_count, const WkpiParams& p, int threads = 1);

/// sum_t cost(t, t) / cost(t, .) from pairwise squared distances.
double total_cost_direct(std::span<const PersistenceImage> images, std::span<const int> labels, int class_count,
                         const WkpiParams& p, int threads = 1);

/// k - trace(H L H^T).
double total_cost_matrix(const CostMatrices& cm, int class_count);

/// sum_r c exp(-w_r).
double coefficient_penalty(const GaussianMixtureWeight& w, double c);
/// Gradient of coefficient_penalty over the 4m parameters.
std::vector<double> coefficient_penalty_gradient(const GaussianMixtureWeight& w, double c);

/// Gradient of total cost plus coefficient penalty over the 4m parameters.
std::vector<double> cost_gradient(std::span<const PersistenceImage> images, std::span<const int> labels,
                                  int class_count, const WkpiParams& p, double penalty_constant, int threads = 1);

struct CostModelOptions {
  /// Pixels whose value range over all images is at most this fraction of
  /// the largest range are dropped. Zero keeps only exactly constant ones out.
  double prune_relative = 1e-10;
  /// Upper bound on the pair x pixel cache; larger problems recompute rows.
  std::size_t cache_budget_bytes = std::size_t{768} << 20;
  int threads = 1;
};

struct CostEvaluation {
  double total_cost = 0.0;
  /// Gradient of the total cost over the 4m parameters; empty when not requested.
  std::vector<double> gradient;
};

/// Total cost and its gradient for a fixed image set, labels and kernel
/// sigma, evaluated for many weights. Identical (image, label) entries are
/// merged, pixels that do not vary are dropped, and per-pair pixel terms
/// that do not depend on the weight are cached when they fit the budget.
class CostModel {
 public:
  CostModel(std::span<const PersistenceImage> images, std::span<const int> labels, int class_count,
            double kernel_sigma, KernelVariant variant, const CostModelOptions& options = {});

  CostEvaluation evaluate(const GaussianMixtureWeight& w, bool with_gradient) const;

  /// Cost over the images listed in `subset` (duplicates allowed). Classes
  /// absent from the subset, or with zero cost inside it, are skipped.
  CostEvaluation evaluate_subset(const GaussianMixtureWeight& w, std::span<const std::size_t> subset,
                                 bool with_gradient) const;

  /// n x n squared WKPI distances over the images (pruned pixels ignored).
  Eigen::MatrixXd squared_distance_matrix(const GaussianMixtureWeight& w) const;

  std::size_t image_count() const { return unit_of_image_.size(); }
  std::size_t unit_count() const { return unit_label_.size(); }
  std::size_t active_pixel_count() const { return centers_.size(); }
  bool cached() const { return cached_; }
  int class_count() const { return class_count_; }

 private:
  struct PairSet {
    std::vector<std::size_t> first;
    std::vector<std::size_t> second;
    std::vector<double> multiplicity;
  };

  CostEvaluation run(const GaussianMixtureWeight& w, const PairSet& pairs, bool use_cache, bool strict,
                     bool with_gradient) const;
  // Weight-independent pixel terms of the pair (g, h): the factor of
  // omega_s in the squared distance for WKPI, d_s^2 / (2 sigma^2) for altWKPI.
  void pair_terms(std::size_t g, std::size_t h, double* out) const;
  Eigen::VectorXd pair_distances(const std::vector<double>& omega, const PairSet& pairs, bool use_cache) const;

  int class_count_;
  double scale_;
  KernelVariant variant_;
  int threads_;
  std::vector<std::size_t> unit_of_image_;
  std::vector<int> unit_label_;
  std::vector<double> unit_count_;
  std::vector<Point2> centers_;
  // unit_count x active pixels, row-major
  std::vector<double> values_;
  PairSet all_pairs_;
  bool cached_ = false;
  std::vector<double> cache_;
};

}  // namespace wkpi

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wkpi/cost.hpp"

namespace wkpi {

struct LineSearchConfig {
  /// First trial step moves the largest parameter by this fraction of the
  /// image layout's bounding-box diagonal.
  double initial_step = 0.05;
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 40;
};

struct TrainConfig {
  /// 0 picks full batch for n <= 500 and 256 otherwise; values >= n mean
  /// full batch.
  std::size_t minibatch_size = 0;
  int max_iterations = 2000;
  double cost_tolerance = 1e-4;
  double penalty_constant = 1.0;
  LineSearchConfig line_search;
  std::uint64_t rng_seed = 0;
  /// Minibatch runs evaluate the full cost every this many iterations.
  int validation_interval = 25;
  int threads = 1;
  CostModelOptions cost_model;

  void validate() const;
  /// Batch size actually used for n objects; n means full batch.
  std::size_t batch_size(std::size_t n) const;
};

struct TracePoint {
  int iteration = 0;
  double total_cost = 0.0;
  /// Total cost plus coefficient penalty.
  double objective = 0.0;
};

struct TrainResult {
  /// Parameters with the lowest objective among full evaluations.
  GaussianMixtureWeight weight;
  double total_cost = 0.0;
  double objective = 0.0;
  /// Full evaluations: the initial point, then one entry per accepted
  /// full-batch step (or per validation in minibatch mode).
  std::vector<TracePoint> trace;
  int iterations = 0;
  std::string stop_reason;
};

TrainResult train_metric(const CostModel& model, const GaussianMixtureWeight& init, const TrainConfig& cfg,
                         double box_diagonal);

/// Builds a CostModel from the images; p.weight is not used.
TrainResult train_metric(std::span<const PersistenceImage> images, std::span<const int> labels, int class_count,
                         const GaussianMixtureWeight& init, const TrainConfig& cfg, const WkpiParams& p);

/// CSV with header "iteration,total_cost,objective".
void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace);

}  // namespace wkpi

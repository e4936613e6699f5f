#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace wkpi {

struct CvConfig {
  int outer_folds = 10;
  int inner_folds = 10;
  int repeats = 10;
  std::vector<int> m_grid{3, 4, 5, 6, 7, 8};
  std::vector<double> sigma_grid{0.001, 0.01, 0.1, 1.0, 10.0, 100.0};
  std::vector<double> C_grid{0.1, 1.0, 10.0, 100.0};
  std::uint64_t seed = 0;
  bool stratified = true;
  int threads = 1;

  void validate() const;
};

/// Fold id in [0, folds) for every item. Items are shuffled (per class when
/// stratified) and dealt round-robin, continuing across classes, so fold
/// sizes differ by at most one.
std::vector<int> make_folds(std::span<const int> labels, int folds, bool stratified, std::uint64_t seed);

/// Test accuracies for one train/test split, indexed
/// [m index][sigma index][C index] over the given grids. Must be safe to
/// call concurrently.
using AccuracyGrid = std::vector<std::vector<std::vector<double>>>;
using FoldEvaluator = std::function<AccuracyGrid(std::span<const std::size_t> train, std::span<const std::size_t> test,
                                                 std::span<const int> m_grid, std::span<const double> sigma_grid,
                                                 std::span<const double> C_grid, std::uint64_t seed)>;

struct CvRow {
  int repeat = 0;
  int fold = 0;
  int m = 0;
  double sigma = 0.0;
  double C = 0.0;
  double accuracy = 0.0;
};

struct CvReport {
  std::vector<CvRow> rows;
  std::vector<double> repeat_means;
  double mean = 0.0;
  /// Sample standard deviation of the repeat means (0 for one repeat).
  double std_dev = 0.0;
};

/// Hyperparameters with the best mean accuracy; ties go to smaller m, then
/// sigma, then C. Grids must be sorted ascending.
struct Selection {
  std::size_t m = 0;
  std::size_t sigma = 0;
  std::size_t C = 0;
};
Selection select_best(const AccuracyGrid& mean_accuracy);

/// Inner CV over the grid on `train`, returning the selected indices into the
/// (sorted) grids.
Selection tune_hyperparameters(std::span<const int> labels, std::span<const std::size_t> train, const CvConfig& cfg,
                               const FoldEvaluator& evaluate, std::uint64_t seed);

CvReport nested_cv(std::span<const int> labels, const CvConfig& cfg, const FoldEvaluator& evaluate);

/// "repeat,fold,m,sigma,C,accuracy" rows followed by "summary,,,,,<mean>".
void write_cv_csv(std::ostream& out, const CvReport& report);
void write_cv_summary(std::ostream& out, const CvReport& report, const CvConfig& cfg);

}  // namespace wkpi

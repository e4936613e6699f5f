#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wkpi {

struct SvmModel {
  std::vector<std::size_t> support_indices;
  /// alpha_i * y_i for each support vector.
  std::vector<double> dual_coefficients;
  double bias = 0.0;
  double C = 1.0;
  std::size_t training_size = 0;
  /// Final maximal KKT violation of the solver.
  double kkt_violation = 0.0;

  /// Negated decision function (labels swapped).
  SvmModel negated() const;
};

struct SvmPrediction {
  int label = 1;
  double margin = 0.0;
};

/// Dual SMO on a precomputed kernel with maximal-violating-pair selection.
/// Labels are +1 / -1 and both must occur.
SvmModel train_svm(const Eigen::MatrixXd& gram, std::span<const int> labels, double C, double tol = 1e-6);

/// sum_i coeff_i * kernel_row[support_i] + bias; margin 0 maps to +1.
SvmPrediction predict(const SvmModel& model, std::span<const double> kernel_row);

/// Value of the dual objective sum alpha - 1/2 alpha^T Q alpha.
double dual_objective(const SvmModel& model, const Eigen::MatrixXd& gram);

struct MulticlassModel {
  int class_count = 0;
  std::vector<SvmModel> models;
};

/// One binary model per class (class t against the rest). With two classes a
/// single model is trained with class 0 as +1 and the second is its negation.
MulticlassModel one_vs_rest(const Eigen::MatrixXd& gram, std::span<const int> labels, int class_count, double C,
                            double tol = 1e-6);

/// Class with the largest margin; ties go to the smallest class id.
int predict_class(const MulticlassModel& model, std::span<const double> kernel_row);

}  // namespace wkpi

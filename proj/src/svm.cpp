#include "wkpi/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wkpi/error.hpp"

namespace wkpi {

SvmModel SvmModel::negated() const {
  SvmModel m = *this;
  for (double& c : m.dual_coefficients) c = -c;
  m.bias = -bias;
  return m;
}

SvmModel train_svm(const Eigen::MatrixXd& gram, std::span<const int> labels, double C, double tol) {
  const auto n = static_cast<std::size_t>(gram.rows());
  if (gram.rows() != gram.cols()) throw InvalidArgument("gram matrix must be square");
  if (labels.size() != n) throw InvalidArgument("gram size does not match label count");
  if (!(C > 0.0) || !std::isfinite(C)) throw InvalidArgument("C must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y == 1) pos = true;
    else if (y == -1) neg = true;
    else throw InvalidArgument("binary labels must be +1 or -1");
  }
  if (!pos || !neg) throw InvalidArgument("both labels must be present to train an SVM");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto a = gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const auto b = gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      if (std::abs(a - b) > 1e-10 * scale) throw InvalidArgument("gram matrix is not symmetric");
    }
  }

  auto Q = [&](std::size_t i, std::size_t j) {
    return static_cast<double>(labels[i] * labels[j]) * gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a^T Q a - e^T a
  auto up = [&](std::size_t i) { return labels[i] == 1 ? alpha[i] < C : alpha[i] > 0.0; };
  auto low = [&](std::size_t i) { return labels[i] == 1 ? alpha[i] > 0.0 : alpha[i] < C; };

  const std::size_t max_iterations = std::max<std::size_t>(10'000'000, 100 * n);
  double violation = 0.0;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    std::size_t i = n, j = n;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -labels[t] * grad[t];
      if (up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    violation = (i == n || j == n) ? 0.0 : gmax - gmin;
    if (violation <= tol) break;

    const double qii = Q(i, i), qjj = Q(j, j), qij = Q(i, j);
    const double yi = labels[i], yj = labels[j];
    double curvature = qii + qjj - 2.0 * yi * yj * qij;
    if (curvature <= 1e-12) curvature = 1e-12;
    // move along y_i d_i = -y_j d_j, which keeps sum y a fixed
    double delta = (gmax - gmin) / curvature;
    // bounds on the step for alpha_i += y_i delta, alpha_j -= y_j delta
    const double room_i = yi > 0 ? C - alpha[i] : alpha[i];
    const double room_j = yj > 0 ? alpha[j] : C - alpha[j];
    delta = std::min({delta, room_i, room_j});
    const double old_i = alpha[i], old_j = alpha[j];
    alpha[i] = room_i == delta ? (yi > 0 ? C : 0.0) : std::clamp(alpha[i] + yi * delta, 0.0, C);
    alpha[j] = room_j == delta ? (yj > 0 ? 0.0 : C) : std::clamp(alpha[j] - yj * delta, 0.0, C);
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += Q(t, i) * di + Q(t, j) * dj;
  }

  // bias from free vectors, else the midpoint of the feasible interval
  double sum_free = 0.0;
  std::size_t free_count = 0;
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = labels[t] * grad[t];
    if (alpha[t] > 0.0 && alpha[t] < C) {
      sum_free += yg;
      ++free_count;
    } else if ((labels[t] == 1 && alpha[t] >= C) || (labels[t] == -1 && alpha[t] <= 0.0)) {
      lb = std::max(lb, yg);
    } else {
      ub = std::min(ub, yg);
    }
  }
  double rho = 0.0;
  if (free_count > 0) {
    rho = sum_free / static_cast<double>(free_count);
  } else if (std::isfinite(ub) && std::isfinite(lb)) {
    rho = 0.5 * (ub + lb);
  } else if (std::isfinite(ub)) {
    rho = ub;
  } else if (std::isfinite(lb)) {
    rho = lb;
  }

  SvmModel model;
  model.C = C;
  model.training_size = n;
  model.bias = -rho;
  model.kkt_violation = violation;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_indices.push_back(t);
      model.dual_coefficients.push_back(alpha[t] * labels[t]);
    }
  }
  return model;
}

SvmPrediction predict(const SvmModel& model, std::span<const double> kernel_row) {
  if (kernel_row.size() != model.training_size) {
    throw InvalidArgument("kernel row has " + std::to_string(kernel_row.size()) + " entries, expected " +
                          std::to_string(model.training_size));
  }
  double margin = model.bias;
  for (std::size_t k = 0; k < model.support_indices.size(); ++k) {
    margin += model.dual_coefficients[k] * kernel_row[model.support_indices[k]];
  }
  return {margin >= 0.0 ? 1 : -1, margin};
}

double dual_objective(const SvmModel& model, const Eigen::MatrixXd& gram) {
  double linear = 0.0, quad = 0.0;
  for (std::size_t a = 0; a < model.support_indices.size(); ++a) {
    linear += std::abs(model.dual_coefficients[a]);
    for (std::size_t b = 0; b < model.support_indices.size(); ++b) {
      quad += model.dual_coefficients[a] * model.dual_coefficients[b] *
              gram(static_cast<Eigen::Index>(model.support_indices[a]), static_cast<Eigen::Index>(model.support_indices[b]));
    }
  }
  return linear - 0.5 * quad;
}

MulticlassModel one_vs_rest(const Eigen::MatrixXd& gram, std::span<const int> labels, int class_count, double C,
                            double tol) {
  if (class_count < 2) throw InvalidArgument("one-vs-rest needs at least two classes");
  std::vector<std::size_t> members(static_cast<std::size_t>(class_count), 0);
  for (int y : labels) {
    if (y < 0 || y >= class_count) throw InvalidArgument("class label out of range");
    ++members[static_cast<std::size_t>(y)];
  }
  for (int t = 0; t < class_count; ++t) {
    if (members[static_cast<std::size_t>(t)] == 0) throw InvalidArgument("class " + std::to_string(t) + " is empty");
  }
  MulticlassModel mc;
  mc.class_count = class_count;
  std::vector<int> binary(labels.size());
  const int trained = class_count == 2 ? 1 : class_count;
  for (int t = 0; t < trained; ++t) {
    for (std::size_t i = 0; i < labels.size(); ++i) binary[i] = labels[i] == t ? 1 : -1;
    mc.models.push_back(train_svm(gram, binary, C, tol));
  }
  if (class_count == 2) mc.models.push_back(mc.models[0].negated());
  return mc;
}

int predict_class(const MulticlassModel& model, std::span<const double> kernel_row) {
  int best = 0;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < model.class_count; ++t) {
    const double m = predict(model.models[static_cast<std::size_t>(t)], kernel_row).margin;
    if (m > best_margin) {
      best_margin = m;
      best = t;
    }
  }
  return best;
}

}  // namespace wkpi

#include "wkpi/cost.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <unordered_map>

#include "wkpi/error.hpp"
#include "wkpi/parallel.hpp"

namespace wkpi {
namespace {

// Fixed number of accumulation chunks so sums do not depend on the thread count.
constexpr std::size_t kChunks = 16;

Eigen::MatrixXd squared_distances(std::span<const PersistenceImage> images, const WkpiParams& p, int threads) {
  p.validate();
  check_same_layout(images);
  const std::size_t n = images.size();
  const auto omega = weight_values(p.weight, images.front().layout.pixel_centers());
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < i; ++j) {
      lambda(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          squared_distance_from_weights(images[i].pixels, images[j].pixels, omega, p.kernel_sigma, p.variant);
    }
  });
  for (Eigen::Index i = 0; i < lambda.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) lambda(j, i) = lambda(i, j);
  }
  return lambda;
}

void check_sizes(std::span<const PersistenceImage> images, std::span<const int> labels) {
  if (images.size() != labels.size()) {
    throw InvalidArgument("got " + std::to_string(images.size()) + " images but " + std::to_string(labels.size()) +
                          " labels");
  }
}

[[noreturn]] void degenerate(int t) {
  throw DegenerateClassError("class " + std::to_string(t) + " has zero total WKPI cost to the data");
}

std::uint64_t hash_pixels(const double* v, std::size_t n, int label) {
  std::uint64_t h = 1469598103934665603ull ^ static_cast<std::uint64_t>(label);
  for (std::size_t s = 0; s < n; ++s) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, v + s, sizeof bits);
    h = (h ^ bits) * 1099511628211ull;
  }
  return h;
}

}  // namespace

void validate_labels(std::span<const int> labels, int class_count) {
  if (labels.size() < 2) throw InvalidArgument("the total cost needs at least two objects");
  if (class_count < 1) throw InvalidArgument("class count must be positive");
  std::vector<int> members(static_cast<std::size_t>(class_count), 0);
  for (int y : labels) {
    if (y < 0 || y >= class_count) throw InvalidArgument("label " + std::to_string(y) + " out of range");
    ++members[static_cast<std::size_t>(y)];
  }
  for (int t = 0; t < class_count; ++t) {
    if (members[static_cast<std::size_t>(t)] == 0) throw InvalidArgument("class " + std::to_string(t) + " is empty");
  }
}

CostMatrices build_cost_matrices(std::span<const PersistenceImage> images, std::span<const int> labels,
                                 int class_count, const WkpiParams& p, int threads) {
  check_sizes(images, labels);
  validate_labels(labels, class_count);
  const auto n = static_cast<Eigen::Index>(images.size());
  CostMatrices cm;
  cm.lambda = squared_distances(images, p, threads);
  cm.g = Eigen::MatrixXd::Zero(n, n);
  cm.g.diagonal() = cm.lambda.rowwise().sum();
  cm.l = cm.g - cm.lambda;
  std::vector<double> to_all(static_cast<std::size_t>(class_count), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) to_all[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += cm.g(i, i);
  cm.h = Eigen::MatrixXd::Zero(class_count, n);
  for (int t = 0; t < class_count; ++t) {
    if (!(to_all[static_cast<std::size_t>(t)] > 0.0)) degenerate(t);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const int t = labels[static_cast<std::size_t>(i)];
    cm.h(t, i) = 1.0 / std::sqrt(to_all[static_cast<std::size_t>(t)]);
  }
  return cm;
}

double total_cost_direct(std::span<const PersistenceImage> images, std::span<const int> labels, int class_count,
                         const WkpiParams& p, int threads) {
  check_sizes(images, labels);
  validate_labels(labels, class_count);
  const Eigen::MatrixXd lambda = squared_distances(images, p, threads);
  std::vector<double> within(static_cast<std::size_t>(class_count), 0.0);
  std::vector<double> to_all(static_cast<std::size_t>(class_count), 0.0);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto t = static_cast<std::size_t>(labels[i]);
    for (std::size_t j = 0; j < images.size(); ++j) {
      const double d2 = lambda(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      to_all[t] += d2;
      if (labels[j] == labels[i]) within[t] += d2;
    }
  }
  double tc = 0.0;
  for (int t = 0; t < class_count; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    if (!(to_all[ti] > 0.0)) degenerate(t);
    tc += within[ti] / to_all[ti];
  }
  return tc;
}

double total_cost_matrix(const CostMatrices& cm, int class_count) {
  if (cm.h.rows() != class_count) throw InvalidArgument("h must have one row per class");
  return static_cast<double>(class_count) - (cm.h * cm.l * cm.h.transpose()).trace();
}

double coefficient_penalty(const GaussianMixtureWeight& w, double c) {
  double total = 0.0;
  for (const auto& comp : w.components) total += c * std::exp(-comp.coefficient);
  return total;
}

std::vector<double> coefficient_penalty_gradient(const GaussianMixtureWeight& w, double c) {
  std::vector<double> g(w.parameter_count(), 0.0);
  for (std::size_t r = 0; r < w.size(); ++r) {
    g[GaussianMixtureWeight::kParamsPerComponent * r + 3] = -c * std::exp(-w.components[r].coefficient);
  }
  return g;
}

std::vector<double> cost_gradient(std::span<const PersistenceImage> images, std::span<const int> labels,
                                  int class_count, const WkpiParams& p, double penalty_constant, int threads) {
  p.validate();
  CostModelOptions options;
  options.prune_relative = 0.0;
  options.threads = threads;
  const CostModel model(images, labels, class_count, p.kernel_sigma, p.variant, options);
  auto g = model.evaluate(p.weight, true).gradient;
  const auto pg = coefficient_penalty_gradient(p.weight, penalty_constant);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += pg[i];
  return g;
}

CostModel::CostModel(std::span<const PersistenceImage> images, std::span<const int> labels, int class_count,
                     double kernel_sigma, KernelVariant variant, const CostModelOptions& options)
    : class_count_(class_count), variant_(variant), threads_(options.threads) {
  check_sizes(images, labels);
  validate_labels(labels, class_count);
  if (!(kernel_sigma > 0.0) || !std::isfinite(kernel_sigma)) throw InvalidArgument("kernel sigma must be positive");
  check_same_layout(images);
  scale_ = 1.0 / (2.0 * kernel_sigma * kernel_sigma);

  const std::size_t n = images.size();
  const std::size_t pixels = images.front().pixels.size();
  std::vector<double> range(pixels, 0.0);
  for (std::size_t s = 0; s < pixels; ++s) {
    double lo = images[0].pixels[s];
    double hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, images[i].pixels[s]);
      hi = std::max(hi, images[i].pixels[s]);
    }
    range[s] = hi - lo;
  }
  const double widest = pixels == 0 ? 0.0 : *std::max_element(range.begin(), range.end());
  const double cutoff = options.prune_relative * widest;
  std::vector<std::size_t> active;
  const auto all_centers = images.front().layout.pixel_centers();
  for (std::size_t s = 0; s < pixels; ++s) {
    if (range[s] > cutoff && range[s] > 0.0) {
      active.push_back(s);
      centers_.push_back(all_centers[s]);
    }
  }

  const std::size_t a = active.size();
  std::vector<double> row(a);
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  unit_of_image_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < a; ++k) row[k] = images[i].pixels[active[k]];
    auto& bucket = buckets[hash_pixels(row.data(), a, labels[i])];
    std::size_t unit = unit_label_.size();
    for (std::size_t u : bucket) {
      if (unit_label_[u] == labels[i] && std::equal(row.begin(), row.end(), values_.begin() + static_cast<std::ptrdiff_t>(u * a))) {
        unit = u;
        break;
      }
    }
    if (unit == unit_label_.size()) {
      bucket.push_back(unit);
      unit_label_.push_back(labels[i]);
      unit_count_.push_back(0.0);
      values_.insert(values_.end(), row.begin(), row.end());
    }
    unit_count_[unit] += 1.0;
    unit_of_image_[i] = unit;
  }

  const std::size_t units = unit_label_.size();
  for (std::size_t g = 0; g < units; ++g) {
    for (std::size_t h = g + 1; h < units; ++h) {
      all_pairs_.first.push_back(g);
      all_pairs_.second.push_back(h);
      all_pairs_.multiplicity.push_back(unit_count_[g] * unit_count_[h]);
    }
  }
  const std::size_t pair_count = all_pairs_.first.size();
  if (a > 0 && pair_count <= options.cache_budget_bytes / sizeof(double) / a) {
    cache_.resize(pair_count * a);
    parallel_for(pair_count, threads_, [&](std::size_t p) {
      pair_terms(all_pairs_.first[p], all_pairs_.second[p], cache_.data() + p * a);
    });
    cached_ = true;
  }
}

void CostModel::pair_terms(std::size_t g, std::size_t h, double* out) const {
  const std::size_t a = centers_.size();
  const double* x = values_.data() + g * a;
  const double* y = values_.data() + h * a;
  if (variant_ == KernelVariant::wkpi) {
    for (std::size_t s = 0; s < a; ++s) {
      const double d = x[s] - y[s];
      out[s] = -2.0 * std::expm1(-d * d * scale_);
    }
  } else {
    for (std::size_t s = 0; s < a; ++s) {
      const double d = x[s] - y[s];
      out[s] = d * d * scale_;
    }
  }
}

CostEvaluation CostModel::evaluate(const GaussianMixtureWeight& w, bool with_gradient) const {
  return run(w, all_pairs_, cached_, true, with_gradient);
}

CostEvaluation CostModel::evaluate_subset(const GaussianMixtureWeight& w, std::span<const std::size_t> subset,
                                          bool with_gradient) const {
  std::vector<double> count(unit_label_.size(), 0.0);
  std::vector<std::size_t> present;
  for (std::size_t i : subset) {
    if (i >= unit_of_image_.size()) throw InvalidArgument("subset index out of range");
    const std::size_t u = unit_of_image_[i];
    if (count[u] == 0.0) present.push_back(u);
    count[u] += 1.0;
  }
  std::sort(present.begin(), present.end());
  PairSet pairs;
  for (std::size_t x = 0; x < present.size(); ++x) {
    for (std::size_t y = x + 1; y < present.size(); ++y) {
      pairs.first.push_back(present[x]);
      pairs.second.push_back(present[y]);
      pairs.multiplicity.push_back(count[present[x]] * count[present[y]]);
    }
  }
  return run(w, pairs, false, false, with_gradient);
}

Eigen::VectorXd CostModel::pair_distances(const std::vector<double>& omega_vec, const PairSet& pairs,
                                          bool use_cache) const {
  const std::size_t a = centers_.size();
  const std::size_t np = pairs.first.size();
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(np));
  if (use_cache && variant_ == KernelVariant::wkpi) {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMajor> cache(cache_.data(), static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(a));
    const Eigen::Map<const Eigen::VectorXd> omega(omega_vec.data(), static_cast<Eigen::Index>(a));
    lambda.noalias() = cache * omega;
    return lambda;
  }
  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(np, 1));
  parallel_for(chunks, threads_, [&](std::size_t c) {
    std::vector<double> terms(use_cache ? 0 : a);
    for (std::size_t p = np * c / chunks; p < np * (c + 1) / chunks; ++p) {
      const double* t = terms.data();
      if (use_cache) {
        t = cache_.data() + p * a;
      } else {
        pair_terms(pairs.first[p], pairs.second[p], terms.data());
      }
      double d2 = 0.0;
      if (variant_ == KernelVariant::wkpi) {
        for (std::size_t s = 0; s < a; ++s) d2 += omega_vec[s] * t[s];
      } else {
        for (std::size_t s = 0; s < a; ++s) d2 += -2.0 * std::expm1(-omega_vec[s] * t[s]);
      }
      lambda(static_cast<Eigen::Index>(p)) = d2;
    }
  });
  return lambda;
}

Eigen::MatrixXd CostModel::squared_distance_matrix(const GaussianMixtureWeight& w) const {
  w.validate();
  const auto omega = weight_values(w, centers_);
  const Eigen::VectorXd lambda = pair_distances(omega, all_pairs_, cached_);
  const std::size_t units = unit_label_.size();
  Eigen::MatrixXd by_unit = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(units), static_cast<Eigen::Index>(units));
  for (std::size_t p = 0; p < all_pairs_.first.size(); ++p) {
    const auto g = static_cast<Eigen::Index>(all_pairs_.first[p]);
    const auto h = static_cast<Eigen::Index>(all_pairs_.second[p]);
    by_unit(g, h) = by_unit(h, g) = lambda(static_cast<Eigen::Index>(p));
  }
  const std::size_t n = unit_of_image_.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          by_unit(static_cast<Eigen::Index>(unit_of_image_[i]), static_cast<Eigen::Index>(unit_of_image_[j]));
    }
  }
  return out;
}

CostEvaluation CostModel::run(const GaussianMixtureWeight& w, const PairSet& pairs, bool use_cache, bool strict,
                              bool with_gradient) const {
  w.validate();
  const std::size_t a = centers_.size();
  const std::size_t np = pairs.first.size();
  const auto omega_vec = weight_values(w, centers_);
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> cache(use_cache ? cache_.data() : nullptr, static_cast<Eigen::Index>(use_cache ? np : 0),
                                         static_cast<Eigen::Index>(a));

  const Eigen::VectorXd lambda = pair_distances(omega_vec, pairs, use_cache);

  const auto k = static_cast<std::size_t>(class_count_);
  // to_all = within + outside, so a class with no outside pairs has a
  // ratio of exactly one and an exactly zero gradient.
  std::vector<double> within(k, 0.0);
  std::vector<double> outside(k, 0.0);
  std::vector<char> present(k, 0);
  for (std::size_t p = 0; p < np; ++p) {
    const auto t = static_cast<std::size_t>(unit_label_[pairs.first[p]]);
    const auto u = static_cast<std::size_t>(unit_label_[pairs.second[p]]);
    const double v = pairs.multiplicity[p] * lambda(static_cast<Eigen::Index>(p));
    if (t == u) {
      within[t] += 2.0 * v;
    } else {
      outside[t] += v;
      outside[u] += v;
    }
    present[t] = present[u] = 1;
  }
  std::vector<double> to_all(k);
  for (std::size_t t = 0; t < k; ++t) to_all[t] = within[t] + outside[t];
  if (strict) {
    for (std::size_t g = 0; g < unit_label_.size(); ++g) present[static_cast<std::size_t>(unit_label_[g])] = 1;
  }

  CostEvaluation result;
  std::vector<char> used(k, 0);
  for (std::size_t t = 0; t < k; ++t) {
    if (!present[t]) continue;
    if (!(to_all[t] > 0.0)) {
      if (strict) degenerate(static_cast<int>(t));
      continue;
    }
    used[t] = 1;
    result.total_cost += within[t] / to_all[t];
  }
  if (!std::isfinite(result.total_cost)) throw NumericalError("total cost is not finite");
  if (!with_gradient) return result;

  // d TC / d lambda_p, both orientations of the pair folded together.
  std::vector<double> same(k, 0.0);
  std::vector<double> cross(k, 0.0);
  for (std::size_t t = 0; t < k; ++t) {
    if (!used[t]) continue;
    const double b2 = to_all[t] * to_all[t];
    same[t] = 2.0 * outside[t] / b2;
    cross[t] = -within[t] / b2;
  }
  Eigen::VectorXd coeff(static_cast<Eigen::Index>(np));
  for (std::size_t p = 0; p < np; ++p) {
    const auto t = static_cast<std::size_t>(unit_label_[pairs.first[p]]);
    const auto u = static_cast<std::size_t>(unit_label_[pairs.second[p]]);
    coeff(static_cast<Eigen::Index>(p)) = pairs.multiplicity[p] * (t == u ? same[t] : cross[t] + cross[u]);
  }

  std::vector<double> d_omega(a, 0.0);
  if (use_cache && variant_ == KernelVariant::wkpi) {
    Eigen::Map<Eigen::VectorXd> out(d_omega.data(), static_cast<Eigen::Index>(a));
    out.noalias() = cache.transpose() * coeff;
  } else {
    const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(np, 1));
    std::vector<std::vector<double>> partial(chunks, std::vector<double>(a, 0.0));
    parallel_for(chunks, threads_, [&](std::size_t c) {
      std::vector<double> terms(use_cache ? 0 : a);
      auto& acc = partial[c];
      for (std::size_t p = np * c / chunks; p < np * (c + 1) / chunks; ++p) {
        const double cp = coeff(static_cast<Eigen::Index>(p));
        if (cp == 0.0) continue;
        const double* t = terms.data();
        if (use_cache) {
          t = cache_.data() + p * a;
        } else {
          pair_terms(pairs.first[p], pairs.second[p], terms.data());
        }
        if (variant_ == KernelVariant::wkpi) {
          for (std::size_t s = 0; s < a; ++s) acc[s] += cp * t[s];
        } else {
          for (std::size_t s = 0; s < a; ++s) acc[s] += cp * 2.0 * t[s] * std::exp(-omega_vec[s] * t[s]);
        }
      }
    });
    for (const auto& part : partial) {
      for (std::size_t s = 0; s < a; ++s) d_omega[s] += part[s];
    }
  }
  result.gradient = chain_weight_gradient(w, centers_, d_omega);
  return result;
}

}  // namespace wkpi

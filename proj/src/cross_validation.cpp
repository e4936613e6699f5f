#include "wkpi/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>

#include "wkpi/error.hpp"
#include "wkpi/parallel.hpp"
#include "wkpi/random.hpp"
#include "wkpi/text_io.hpp"

namespace wkpi {
namespace {

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

void check_shape(const AccuracyGrid& g, std::size_t nm, std::size_t ns, std::size_t nc) {
  bool ok = g.size() == nm;
  for (const auto& a : g) {
    ok = ok && a.size() == ns;
    for (const auto& b : a) ok = ok && b.size() == nc;
  }
  if (!ok) throw InvalidArgument("fold evaluator returned a grid of the wrong shape");
}

}  // namespace

void CvConfig::validate() const {
  if (outer_folds < 2 || inner_folds < 2) throw InvalidArgument("fold counts must be at least 2");
  if (repeats < 1) throw InvalidArgument("repeats must be positive");
  if (m_grid.empty() || sigma_grid.empty() || C_grid.empty()) throw InvalidArgument("hyperparameter grids must be non-empty");
  for (int m : m_grid) {
    if (m < 1) throw InvalidArgument("m grid values must be positive");
  }
  for (double s : sigma_grid) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("sigma grid values must be positive");
  }
  for (double c : C_grid) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("C grid values must be positive");
  }
}

std::vector<int> make_folds(std::span<const int> labels, int folds, bool stratified, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("fold count must be at least 2");
  if (labels.size() < static_cast<std::size_t>(folds)) {
    throw InvalidArgument("cannot split " + std::to_string(labels.size()) + " items into " + std::to_string(folds) +
                          " folds");
  }
  Rng rng(seed);
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[stratified ? labels[i] : 0].push_back(i);
  std::vector<int> fold(labels.size(), 0);
  std::size_t next = 0;
  for (auto& [label, members] : groups) {
    if (stratified && members.size() < static_cast<std::size_t>(folds)) {
      throw InvalidArgument("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                            " members, fewer than " + std::to_string(folds) + " folds");
    }
    shuffle(members, rng);
    for (std::size_t i : members) fold[i] = static_cast<int>(next++ % static_cast<std::size_t>(folds));
  }
  return fold;
}

Selection select_best(const AccuracyGrid& acc) {
  Selection best;
  double best_value = -1.0;
  for (std::size_t a = 0; a < acc.size(); ++a) {
    for (std::size_t b = 0; b < acc[a].size(); ++b) {
      for (std::size_t c = 0; c < acc[a][b].size(); ++c) {
        if (acc[a][b][c] > best_value) {
          best_value = acc[a][b][c];
          best = {a, b, c};
        }
      }
    }
  }
  return best;
}

Selection tune_hyperparameters(std::span<const int> labels, std::span<const std::size_t> train, const CvConfig& cfg,
                               const FoldEvaluator& evaluate, std::uint64_t seed) {
  const auto ms = sorted_unique(cfg.m_grid);
  const auto ss = sorted_unique(cfg.sigma_grid);
  const auto cs = sorted_unique(cfg.C_grid);
  std::vector<int> train_labels(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) train_labels[i] = labels[train[i]];
  const auto fold = make_folds(train_labels, cfg.inner_folds, cfg.stratified, derive_seed(seed, "inner-folds"));
  AccuracyGrid sum(ms.size(), std::vector<std::vector<double>>(ss.size(), std::vector<double>(cs.size(), 0.0)));
  for (int f = 0; f < cfg.inner_folds; ++f) {
    std::vector<std::size_t> fit, held;
    for (std::size_t i = 0; i < train.size(); ++i) (fold[i] == f ? held : fit).push_back(train[i]);
    const auto acc = evaluate(fit, held, ms, ss, cs, derive_seed(seed, "inner-eval", static_cast<std::uint64_t>(f)));
    check_shape(acc, ms.size(), ss.size(), cs.size());
    for (std::size_t a = 0; a < ms.size(); ++a) {
      for (std::size_t b = 0; b < ss.size(); ++b) {
        for (std::size_t c = 0; c < cs.size(); ++c) sum[a][b][c] += acc[a][b][c];
      }
    }
  }
  return select_best(sum);
}

CvReport nested_cv(std::span<const int> labels, const CvConfig& cfg, const FoldEvaluator& evaluate) {
  cfg.validate();
  const auto ms = sorted_unique(cfg.m_grid);
  const auto ss = sorted_unique(cfg.sigma_grid);
  const auto cs = sorted_unique(cfg.C_grid);
  const auto outer = static_cast<std::size_t>(cfg.outer_folds);
  const auto repeats = static_cast<std::size_t>(cfg.repeats);

  std::vector<std::vector<int>> fold_of(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    fold_of[r] = make_folds(labels, cfg.outer_folds, cfg.stratified, derive_seed(cfg.seed, "outer-folds", r));
  }

  CvReport report;
  report.rows.resize(repeats * outer);
  parallel_for(repeats * outer, cfg.threads, [&](std::size_t job) {
    const std::size_t r = job / outer;
    const int f = static_cast<int>(job % outer);
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < labels.size(); ++i) (fold_of[r][i] == f ? test : train).push_back(i);
    const std::uint64_t job_seed = derive_seed(cfg.seed, "outer-job", job);
    const Selection sel = tune_hyperparameters(labels, train, cfg, evaluate, job_seed);
    const int m = ms[sel.m];
    const double sigma = ss[sel.sigma];
    const double C = cs[sel.C];
    const auto acc = evaluate(train, test, std::span<const int>(&m, 1), std::span<const double>(&sigma, 1),
                              std::span<const double>(&C, 1), derive_seed(job_seed, "outer-eval"));
    check_shape(acc, 1, 1, 1);
    report.rows[job] = {static_cast<int>(r), f, m, sigma, C, acc[0][0][0]};
  });

  // every outer test split is scored once, so a repeat's accuracy is the
  // fold mean weighted by fold size
  for (std::size_t r = 0; r < repeats; ++r) {
    std::vector<double> size(outer, 0.0);
    for (int f : fold_of[r]) size[static_cast<std::size_t>(f)] += 1.0;
    double correct = 0.0;
    for (std::size_t f = 0; f < outer; ++f) correct += report.rows[r * outer + f].accuracy * size[f];
    report.repeat_means.push_back(correct / static_cast<double>(labels.size()));
  }
  double total = 0.0;
  for (double v : report.repeat_means) total += v;
  report.mean = total / static_cast<double>(repeats);
  if (repeats > 1) {
    double ss_dev = 0.0;
    for (double v : report.repeat_means) ss_dev += (v - report.mean) * (v - report.mean);
    report.std_dev = std::sqrt(ss_dev / static_cast<double>(repeats - 1));
  }
  return report;
}

void write_cv_csv(std::ostream& out, const CvReport& report) {
  out << "repeat,fold,m,sigma,C,accuracy\n";
  for (const auto& r : report.rows) {
    out << r.repeat << ',' << r.fold << ',' << r.m << ',' << format_double(r.sigma) << ',' << format_double(r.C) << ','
        << format_double(r.accuracy) << '\n';
  }
  out << "summary,,,,," << format_double(report.mean) << '\n';
}

void write_cv_summary(std::ostream& out, const CvReport& report, const CvConfig& cfg) {
  out << "nested cross-validation: " << cfg.repeats << " repeats of " << cfg.outer_folds << " outer x "
      << cfg.inner_folds << " inner folds\n";
  for (std::size_t r = 0; r < report.repeat_means.size(); ++r) {
    out << "repeat " << r << ": accuracy " << format_double(report.repeat_means[r]) << '\n';
  }
  out << "mean accuracy: " << format_double(report.mean) << '\n';
  out << "standard deviation: " << format_double(report.std_dev) << '\n';
}

}  // namespace wkpi

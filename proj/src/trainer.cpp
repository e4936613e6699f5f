#include "wkpi/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "wkpi/error.hpp"
#include "wkpi/random.hpp"
#include "wkpi/text_io.hpp"

namespace wkpi {
namespace {

constexpr std::size_t kP = GaussianMixtureWeight::kParamsPerComponent;

struct State {
  std::vector<double> theta;
  double total_cost = 0.0;
  double objective = 0.0;
  std::vector<double> tc_gradient;
};

class Objective {
 public:
  Objective(const CostModel& model, const TrainConfig& cfg, double spread_floor)
      : model_(model), cfg_(cfg), spread_floor_(spread_floor) {}

  void project(std::vector<double>& theta) const {
    for (std::size_t r = 0; r * kP < theta.size(); ++r) {
      theta[kP * r + 2] = std::max(theta[kP * r + 2], spread_floor_);
      theta[kP * r + 3] = std::max(theta[kP * r + 3], 0.0);
    }
  }

  State full(const std::vector<double>& theta, bool with_gradient) const {
    const auto w = GaussianMixtureWeight::from_parameters(theta);
    const auto e = model_.evaluate(w, with_gradient);
    return finish(theta, w, e);
  }

  State subset(const std::vector<double>& theta, std::span<const std::size_t> batch) const {
    const auto w = GaussianMixtureWeight::from_parameters(theta);
    return finish(theta, w, model_.evaluate_subset(w, batch, true));
  }

  std::vector<double> full_gradient(const State& s) const {
    auto g = s.tc_gradient;
    const auto pg = coefficient_penalty_gradient(GaussianMixtureWeight::from_parameters(s.theta), cfg_.penalty_constant);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += pg[i];
    return g;
  }

 private:
  State finish(const std::vector<double>& theta, const GaussianMixtureWeight& w, const CostEvaluation& e) const {
    State s;
    s.theta = theta;
    s.total_cost = e.total_cost;
    s.objective = e.total_cost + coefficient_penalty(w, cfg_.penalty_constant);
    if (!std::isfinite(s.objective)) throw NumericalError("training objective is not finite");
    s.tc_gradient = e.gradient;
    return s;
  }

  const CostModel& model_;
  const TrainConfig& cfg_;
  double spread_floor_;
};

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

// One projected Armijo step from `at` (which carries its gradient). Returns
// false when no trial step gives sufficient decrease. On success `next` holds
// the accepted point with its gradient and `step` the accepted step length.
bool armijo_step(const Objective& obj, const TrainConfig& cfg, const State& at, const std::vector<double>& g,
                 double& step, State& next) {
  const auto& ls = cfg.line_search;
  double alpha = step;
  for (int trial = 0; trial <= ls.max_backtracks; ++trial, alpha *= ls.backtrack) {
    std::vector<double> theta(at.theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = at.theta[i] - alpha * g[i];
    obj.project(theta);
    double decrease = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) decrease += g[i] * (at.theta[i] - theta[i]);
    if (!(decrease > 0.0)) return false;
    State candidate;
    try {
      candidate = obj.full(theta, false);
    } catch (const DegenerateClassError&) {
      continue;
    }
    if (candidate.objective <= at.objective - ls.sufficient_decrease * decrease) {
      next = obj.full(theta, true);
      step = alpha;
      return true;
    }
  }
  return false;
}

}  // namespace

void TrainConfig::validate() const {
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
  if (!(cost_tolerance > 0.0)) throw InvalidArgument("cost tolerance must be positive");
  if (!(penalty_constant >= 0.0) || !std::isfinite(penalty_constant)) {
    throw InvalidArgument("penalty constant must be non-negative");
  }
  if (!(line_search.initial_step > 0.0)) throw InvalidArgument("initial step must be positive");
  if (!(line_search.backtrack > 0.0 && line_search.backtrack < 1.0)) {
    throw InvalidArgument("backtrack factor must lie in (0, 1)");
  }
  if (!(line_search.sufficient_decrease > 0.0 && line_search.sufficient_decrease < 1.0)) {
    throw InvalidArgument("sufficient-decrease constant must lie in (0, 1)");
  }
  if (line_search.max_backtracks < 0) throw InvalidArgument("max_backtracks must be non-negative");
  if (validation_interval < 1) throw InvalidArgument("validation interval must be positive");
}

std::size_t TrainConfig::batch_size(std::size_t n) const {
  if (minibatch_size == 0) return n <= 500 ? n : std::min<std::size_t>(256, n);
  return std::min(minibatch_size, n);
}

TrainResult train_metric(const CostModel& model, const GaussianMixtureWeight& init, const TrainConfig& cfg,
                         double box_diagonal) {
  cfg.validate();
  init.validate();
  if (!(box_diagonal > 0.0) || !std::isfinite(box_diagonal)) throw InvalidArgument("box diagonal must be positive");
  const Objective obj(model, cfg, 1e-6 * box_diagonal);

  auto theta0 = init.parameters();
  obj.project(theta0);
  State cur = obj.full(theta0, true);

  TrainResult res;
  res.trace.push_back({0, cur.total_cost, cur.objective});
  State best = cur;
  auto remember = [&](const State& s, int it) {
    res.trace.push_back({it, s.total_cost, s.objective});
    if (s.objective < best.objective) best = s;
  };

  const std::size_t n = model.image_count();
  const std::size_t batch = cfg.batch_size(n);
  double step = 0.0;
  auto first_step = [&](const std::vector<double>& g) {
    return cfg.line_search.initial_step * box_diagonal / inf_norm(g);
  };

  if (batch >= n) {
    for (int it = 1; it <= cfg.max_iterations; ++it) {
      res.iterations = it;
      if (all_zero(cur.tc_gradient)) {
        res.stop_reason = "zero cost gradient";
        break;
      }
      const auto g = obj.full_gradient(cur);
      if (inf_norm(g) == 0.0) {
        res.stop_reason = "zero gradient";
        break;
      }
      double trial = step > 0.0 ? 2.0 * step : first_step(g);
      State next;
      if (!armijo_step(obj, cfg, cur, g, trial, next)) {
        res.stop_reason = "line search found no decrease";
        break;
      }
      step = trial;
      const double change = std::abs(next.total_cost - cur.total_cost);
      cur = std::move(next);
      remember(cur, it);
      if (change <= cfg.cost_tolerance) {
        res.stop_reason = "cost change below tolerance";
        break;
      }
      if (it == cfg.max_iterations) res.stop_reason = "iteration limit";
    }
  } else {
    Rng rng = make_rng(cfg.rng_seed, "minibatch");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    State last_full = cur;
    std::vector<double> theta = cur.theta;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
      res.iterations = it;
      if (step == 0.0) {
        // a full-batch line search fixes the step used by the minibatch iterations
        if (all_zero(cur.tc_gradient)) {
          res.stop_reason = "zero cost gradient";
          break;
        }
        const auto g = obj.full_gradient(cur);
        double trial = first_step(g);
        State next;
        if (!armijo_step(obj, cfg, cur, g, trial, next)) {
          res.stop_reason = "line search found no decrease";
          break;
        }
        step = trial;
        cur = std::move(next);
        theta = cur.theta;
        last_full = cur;
        remember(cur, it);
        continue;
      }
      for (std::size_t i = 0; i < batch; ++i) std::swap(order[i], order[i + uniform_index(rng, n - i)]);
      const State s = obj.subset(theta, std::span<const std::size_t>(order.data(), batch));
      const auto g = obj.full_gradient(s);
      for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= step * g[i];
      obj.project(theta);
      if (it % cfg.validation_interval != 0 && it != cfg.max_iterations) continue;
      State full;
      try {
        full = obj.full(theta, true);
      } catch (const DegenerateClassError&) {
        theta = best.theta;
        step *= cfg.line_search.backtrack;
        continue;
      }
      remember(full, it);
      const double change = std::abs(full.total_cost - last_full.total_cost);
      if (full.objective > last_full.objective) {
        // the fixed step overshot: restart from the best point with a shorter step
        step *= cfg.line_search.backtrack;
        theta = best.theta;
      }
      last_full = full;
      if (change <= cfg.cost_tolerance) {
        res.stop_reason = "cost change below tolerance";
        break;
      }
      if (it == cfg.max_iterations) res.stop_reason = "iteration limit";
    }
  }

  res.weight = GaussianMixtureWeight::from_parameters(best.theta);
  res.total_cost = best.total_cost;
  res.objective = best.objective;
  return res;
}

TrainResult train_metric(std::span<const PersistenceImage> images, std::span<const int> labels, int class_count,
                         const GaussianMixtureWeight& init, const TrainConfig& cfg, const WkpiParams& p) {
  if (images.empty()) throw InvalidArgument("no images to train on");
  auto options = cfg.cost_model;
  options.threads = cfg.threads;
  const CostModel model(images, labels, class_count, p.kernel_sigma, p.variant, options);
  return train_metric(model, init, cfg, images.front().layout.max_diagonal());
}

void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace) {
  out << "iteration,total_cost,objective\n";
  for (const auto& t : trace) {
    out << t.iteration << ',' << format_double(t.total_cost) << ',' << format_double(t.objective) << '\n';
  }
}

}  // namespace wkpi

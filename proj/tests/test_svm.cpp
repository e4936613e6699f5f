#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "wkpi/cross_validation.hpp"
#include "wkpi/error.hpp"
#include "wkpi/pipeline.hpp"
#include "wkpi/svm.hpp"
#include "wkpi/synthetic.hpp"

using namespace wkpi;

namespace {

// Gaussian kernel over random 2-D features; class +1 shifted by `gap`.
struct Instance {
  Eigen::MatrixXd gram;
  std::vector<int> y;
};

Instance random_instance(std::size_t n, double gap, Rng& rng, int classes = 2) {
  std::vector<std::array<double, 2>> x(n);
  Instance out;
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(classes));
    out.y.push_back(classes == 2 ? (c == 0 ? 1 : -1) : c);
    x[i] = {uniform_unit(rng) + gap * c, uniform_unit(rng) + (classes > 2 && c == 2 ? gap : 0.0)};
  }
  out.gram.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::exp(-(std::pow(x[i][0] - x[j][0], 2) + std::pow(x[i][1] - x[j][1], 2)));
  return out;
}

std::vector<double> row_of(const Eigen::MatrixXd& m, Eigen::Index i) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

}  // namespace

TEST_CASE("two-point svm") {
  const Eigen::MatrixXd K = Eigen::MatrixXd::Identity(2, 2);
  const std::vector<int> y{1, -1};
  const auto m = train_svm(K, y, 10.0);
  REQUIRE(m.support_indices.size() == 2);
  CHECK(m.dual_coefficients[0] == doctest::Approx(1.0));
  CHECK(m.dual_coefficients[1] == doctest::Approx(-1.0));
  CHECK(m.bias == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(predict(m, row_of(K, 0)).label == 1);
  CHECK(predict(m, row_of(K, 1)).label == -1);

  const auto zero = predict(SvmModel{{0, 1}, {1.0, -1.0}, 0.0, 1.0, 2, 0.0}, std::vector<double>{0.0, 0.0});
  CHECK(zero.margin == 0.0);
  CHECK(zero.label == 1);

  const std::vector<double> r1{0.3, 0.7}, r2{1.1, -0.4};
  const SvmModel lin{{0, 1}, {0.5, -2.0}, 0.0, 1.0, 2, 0.0};
  CHECK(predict(lin, std::vector<double>{r1[0] + r2[0], r1[1] + r2[1]}).margin ==
        doctest::Approx(predict(lin, r1).margin + predict(lin, r2).margin));

  CHECK_THROWS_AS(train_svm(K, std::vector<int>{1, 1}, 1.0), InvalidArgument);
  Eigen::MatrixXd asym = K;
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(train_svm(asym, y, 1.0), InvalidArgument);
  CHECK_THROWS_AS(predict(m, std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("svm agrees with the projected-gradient QP oracle") {
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 6 + uniform_index(rng, 15);
    const auto inst = random_instance(n, 0.3 + uniform_unit(rng), rng);
    const double C = std::pow(10.0, static_cast<double>(uniform_index(rng, 4)) - 1.0);
    const auto model = train_svm(inst.gram, inst.y, C, 1e-6);
    CHECK(model.kkt_violation <= 1e-6);
    double balance = 0.0;
    for (double c : model.dual_coefficients) {
      balance += c;
      CHECK(std::abs(c) <= C);
    }
    CHECK(std::abs(balance) <= 1e-9 * C * static_cast<double>(n));
    const auto alpha = oracle::svm_dual_by_projected_gradient(inst.gram, inst.y, C);
    const double reference = oracle::svm_dual_value(inst.gram, inst.y, alpha);
    const double ours = dual_objective(model, inst.gram);
    CHECK(std::abs(ours - reference) <= 1e-6 * std::max(1.0, std::abs(reference)));
  }
}

TEST_CASE("separable instance is fit exactly") {
  Rng rng(18);
  const auto inst = random_instance(20, 3.0, rng);
  const auto model = train_svm(inst.gram, inst.y, 1000.0);
  for (Eigen::Index i = 0; i < inst.gram.rows(); ++i)
    CHECK(predict(model, row_of(inst.gram, i)).label == inst.y[static_cast<std::size_t>(i)]);
}

TEST_CASE("one-vs-rest") {
  Rng rng(19);
  const auto three = random_instance(30, 4.0, rng, 3);
  const auto mc = one_vs_rest(three.gram, three.y, 3, 100.0);
  CHECK(mc.models.size() == 3);
  for (Eigen::Index i = 0; i < three.gram.rows(); ++i)
    CHECK(predict_class(mc, row_of(three.gram, i)) == three.y[static_cast<std::size_t>(i)]);

  const auto two = random_instance(16, 0.5, rng);
  std::vector<int> cls(two.y.size());
  for (std::size_t i = 0; i < cls.size(); ++i) cls[i] = two.y[i] == 1 ? 0 : 1;
  const auto ovr = one_vs_rest(two.gram, cls, 2, 1.0);
  const auto bin = train_svm(two.gram, two.y, 1.0);
  for (Eigen::Index i = 0; i < two.gram.rows(); ++i) {
    const auto r = row_of(two.gram, i);
    CHECK(predict_class(ovr, r) == (predict(bin, r).label == 1 ? 0 : 1));
  }

  // identical margins resolve to the smallest class id
  MulticlassModel tie{3, {SvmModel{{}, {}, 0.5, 1, 2, 0}, SvmModel{{}, {}, 0.5, 1, 2, 0}, SvmModel{{}, {}, 0.5, 1, 2, 0}}};
  CHECK(predict_class(tie, std::vector<double>{0.0, 0.0}) == 0);
  std::vector<int> empty_class{0, 0, 2, 2};
  CHECK_THROWS_AS(one_vs_rest(Eigen::MatrixXd::Identity(4, 4), empty_class, 3, 1.0), InvalidArgument);
}

TEST_CASE("folds") {
  Rng rng(20);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 20 + uniform_index(rng, 60);
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(uniform_index(rng, 3));
    y[0] = 0;
    for (std::size_t i = 1; i < 11; ++i) y[i] = 1;
    for (std::size_t i = 11; i < 21; ++i) y[i] = 2;
    for (std::size_t i = 21; i < 31 && i < n; ++i) y[i] = 0;
    for (bool strat : {true, false}) {
      const auto f = make_folds(y, 10, strat, 5);
      std::vector<int> size(10, 0);
      for (int v : f) size[static_cast<std::size_t>(v)]++;
      CHECK(*std::max_element(size.begin(), size.end()) - *std::min_element(size.begin(), size.end()) <= 1);
      CHECK(make_folds(y, 10, strat, 5) == f);
      if (strat) {
        for (int c = 0; c < 3; ++c) {
          std::vector<int> per(10, 0);
          for (std::size_t i = 0; i < n; ++i)
            if (y[i] == c) per[static_cast<std::size_t>(f[i])]++;
          CHECK(*std::max_element(per.begin(), per.end()) - *std::min_element(per.begin(), per.end()) <= 1);
        }
      }
    }
  }
  CHECK_THROWS_AS(make_folds(std::vector<int>{0, 0, 1}, 2, true, 1), InvalidArgument);
}

TEST_CASE("selection tie-breaking") {
  AccuracyGrid g(2, std::vector<std::vector<double>>(2, std::vector<double>(2, 0.5)));
  auto s = select_best(g);
  CHECK(s.m == 0);
  CHECK(s.sigma == 0);
  CHECK(s.C == 0);
  g[1][0][1] = 0.9;
  g[1][1][0] = 0.9;
  s = select_best(g);
  CHECK(s.m == 1);
  CHECK(s.sigma == 0);
  CHECK(s.C == 1);
}

TEST_CASE("nested cv with a synthetic evaluator") {
  std::vector<int> y(40);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 2);
  CvConfig cfg;
  cfg.outer_folds = 4;
  cfg.inner_folds = 3;
  cfg.repeats = 3;
  cfg.m_grid = {3, 4};
  cfg.sigma_grid = {0.1, 1.0};
  cfg.C_grid = {1.0};
  cfg.seed = 42;

  std::mutex mu;
  std::set<std::pair<std::size_t, std::size_t>> seen_overlap;
  // accuracy depends on the split and the seed only; m=4, sigma=1 is best
  FoldEvaluator eval = [&](std::span<const std::size_t> train, std::span<const std::size_t> test,
                           std::span<const int> ms, std::span<const double> ss, std::span<const double> cs,
                           std::uint64_t seed) {
    const std::set<std::size_t> tr(train.begin(), train.end());
    for (auto t : test) {
      if (tr.count(t)) {
        std::lock_guard lock(mu);
        seen_overlap.insert({t, t});
      }
    }
    AccuracyGrid acc(ms.size(), std::vector<std::vector<double>>(ss.size(), std::vector<double>(cs.size())));
    for (std::size_t a = 0; a < ms.size(); ++a)
      for (std::size_t b = 0; b < ss.size(); ++b)
        for (std::size_t c = 0; c < cs.size(); ++c)
          acc[a][b][c] = 0.5 + 0.1 * (ms[a] == 4) + 0.2 * (ss[b] == 1.0) + static_cast<double>(seed % 7) * 1e-3;
    return acc;
  };
  const auto r = nested_cv(y, cfg, eval);
  CHECK(seen_overlap.empty());
  CHECK(r.rows.size() == 12);
  for (const auto& row : r.rows) {
    CHECK(row.m == 4);
    CHECK(row.sigma == 1.0);
  }
  CHECK(r.repeat_means.size() == 3);
  const double mean = (r.repeat_means[0] + r.repeat_means[1] + r.repeat_means[2]) / 3;
  CHECK(r.mean == doctest::Approx(mean));
  double ss = 0;
  for (double v : r.repeat_means) ss += (v - mean) * (v - mean);
  CHECK(r.std_dev == doctest::Approx(std::sqrt(ss / 2)));

  cfg.threads = 3;
  const auto again = nested_cv(y, cfg, eval);
  std::stringstream a, b;
  write_cv_csv(a, r);
  write_cv_csv(b, again);
  CHECK(a.str() == b.str());
  const auto text = a.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 14);
  CHECK(text.find("summary,,,,,") != std::string::npos);
}

namespace {

struct CvFixture {
  std::vector<PersistenceDiagram> diagrams;
  std::vector<int> labels;
  ImageOptions image;
  MetricOptions metric;
  CvConfig cfg;

  CvFixture() {
    const auto data = cycles_vs_trees(20, 6, 12, 3);
    DiagramOptions d;
    d.descriptor = DescriptorType::degree;
    diagrams = graph_diagrams(data.graphs, d);
    labels = data.labels;
    image.y_resolution = 10;
    cfg.outer_folds = 4;
    cfg.inner_folds = 3;
    cfg.repeats = 1;
    cfg.m_grid = {2, 3};
    cfg.sigma_grid = {0.1, 1.0};
    cfg.C_grid = {1.0, 10.0};
    cfg.seed = 7;
  }
};

}  // namespace

TEST_CASE("hyperparameter selection ignores the test split") {
  CvFixture fx;
  std::vector<std::size_t> train, test;
  const auto folds = make_folds(fx.labels, 4, true, 1);
  for (std::size_t i = 0; i < fx.labels.size(); ++i) (folds[i] == 0 ? test : train).push_back(i);

  const WkpiFoldEvaluator base(fx.diagrams, fx.labels, 2, fx.image, fx.metric);
  const auto chosen = tune_hyperparameters(fx.labels, train, fx.cfg, base, 99);

  auto perturbed = fx.diagrams;
  for (auto i : test)
    for (auto& p : perturbed[i].points) {
      p.birth += 3.0;
      p.death += 7.0;
    }
  const WkpiFoldEvaluator moved(perturbed, fx.labels, 2, fx.image, fx.metric);
  const auto again = tune_hyperparameters(fx.labels, train, fx.cfg, moved, 99);
  CHECK(again.m == chosen.m);
  CHECK(again.sigma == chosen.sigma);
  CHECK(again.C == chosen.C);
}

TEST_CASE("permuted labels give chance accuracy") {
  CvFixture fx;
  Rng rng(123);
  auto shuffled = fx.labels;
  for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[uniform_index(rng, i)]);
  const WkpiFoldEvaluator eval(fx.diagrams, shuffled, 2, fx.image, fx.metric);
  const auto r = nested_cv(shuffled, fx.cfg, eval);
  const double n = static_cast<double>(shuffled.size());
  CHECK(std::abs(r.mean - 0.5) <= 3.0 * std::sqrt(0.25 / n));

  const WkpiFoldEvaluator real(fx.diagrams, fx.labels, 2, fx.image, fx.metric);
  CHECK(nested_cv(fx.labels, fx.cfg, real).mean >= 0.9);
}

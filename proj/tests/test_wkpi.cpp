#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "wkpi/cost.hpp"
#include "wkpi/error.hpp"
#include "wkpi/init.hpp"
#include "wkpi/kernel.hpp"
#include "wkpi/mixture.hpp"
#include "wkpi/trainer.hpp"

using namespace wkpi;

namespace {

const GridSpec kGrid = GridSpec::from_bounds(0, 1, 0, 1, 4);

PersistenceImage image_of(std::vector<double> pixels, const GridSpec& grid = kGrid) {
  return {ImageLayout{{{0, grid, 0}}}, std::move(pixels)};
}

std::vector<PersistenceImage> random_images(std::size_t n, Rng& rng) {
  std::vector<PersistenceImage> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> px(kGrid.size());
    for (double& v : px) v = uniform_unit(rng);
    out.push_back(image_of(std::move(px)));
  }
  return out;
}

GaussianMixtureWeight random_mixture(std::size_t m, Rng& rng) {
  GaussianMixtureWeight w;
  for (std::size_t r = 0; r < m; ++r)
    w.components.push_back({uniform_unit(rng), uniform_unit(rng), 0.2 + 0.6 * uniform_unit(rng), 0.1 + 1.9 * uniform_unit(rng)});
  return w;
}

std::vector<int> random_labels(std::size_t n, int k, Rng& rng) {
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i < static_cast<std::size_t>(k) ? i : uniform_index(rng, static_cast<std::size_t>(k)));
  return y;
}

// single-pixel image and a mixture taking the value `w` at its center
WkpiParams one_pixel_params(double w, KernelVariant variant) {
  return {1.0, GaussianMixtureWeight{{{0.5, 0.5, 1.0, w}}}, variant};
}

}  // namespace

TEST_CASE("mixture weight") {
  const GaussianMixtureWeight one{{{1, 2, 0.5, 3}}};
  CHECK(one({1, 2}) == 3.0);
  CHECK(one({1.5, 2}) == doctest::Approx(3 * std::exp(-1.0)));
  CHECK(one({1, 1.5}) == doctest::Approx(3 * std::exp(-1.0)));
  const GaussianMixtureWeight other{{{0, 0, 1, 2}}};
  const GaussianMixtureWeight both{{one.components[0], other.components[0]}};
  CHECK(both({0.3, 0.7}) == doctest::Approx(one({0.3, 0.7}) + other({0.3, 0.7})));

  CHECK(GaussianMixtureWeight::from_parameters(both.parameters()) == both);
  CHECK_THROWS_AS(GaussianMixtureWeight{}.validate(), InvalidArgument);
  CHECK_THROWS_AS((GaussianMixtureWeight{{{0, 0, 0, 1}}}.validate()), InvalidArgument);
  CHECK_THROWS_AS((GaussianMixtureWeight{{{0, 0, 1, -1}}}.validate()), InvalidArgument);

  std::stringstream ss;
  write_weight(ss, both);
  CHECK(read_weight(ss) == both);
}

TEST_CASE("mixture parameter gradient matches finite differences") {
  Rng rng(13);
  const auto w = random_mixture(3, rng);
  const auto centers = kGrid.pixel_centers();
  std::vector<double> upstream(centers.size());
  for (double& v : upstream) v = uniform_unit(rng) - 0.5;
  auto f = [&](const GaussianMixtureWeight& x) {
    const auto om = weight_values(x, centers);
    return std::inner_product(om.begin(), om.end(), upstream.begin(), 0.0);
  };
  const auto grad = chain_weight_gradient(w, centers, upstream);
  auto theta = w.parameters();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    auto tp = theta, tm = theta;
    tp[i] += 1e-6;
    tm[i] -= 1e-6;
    const double fd = (f(GaussianMixtureWeight::from_parameters(tp)) - f(GaussianMixtureWeight::from_parameters(tm))) / 2e-6;
    CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("kernel values") {
  const auto g1 = GridSpec::from_bounds(0, 1, 0, 1, 1);
  const auto a = image_of({0.0}, g1);
  const auto b = image_of({1.0}, g1);
  const auto p = one_pixel_params(1.0, KernelVariant::wkpi);
  CHECK(wkpi_kernel(a, a, p) == 1.0);
  CHECK(wkpi_kernel(a, b, p) == doctest::Approx(0.606531).epsilon(1e-6));
  CHECK(wkpi_kernel(a, b, one_pixel_params(0.0, KernelVariant::wkpi)) == 0.0);
  CHECK(wkpi_distance(a, b, p) == doctest::Approx(0.887095).epsilon(1e-6));
  CHECK(std::pow(wkpi_distance(a, b, p), 2) == doctest::Approx(0.786939).epsilon(1e-6));
  CHECK(wkpi_distance(a, a, p) == 0.0);

  const auto q = one_pixel_params(2.0, KernelVariant::alt_wkpi);
  CHECK(alt_wkpi_kernel(a, a, q) == 1.0);
  CHECK(alt_wkpi_kernel(a, b, q) == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(alt_wkpi_kernel(a, b, one_pixel_params(0.0, KernelVariant::alt_wkpi)) == 1.0);
  CHECK(kernel_value(a, b, q) == alt_wkpi_kernel(a, b, q));

  Rng rng(1);
  const auto imgs = random_images(2, rng);
  const WkpiParams r{0.3, random_mixture(2, rng), KernelVariant::wkpi};
  const auto omega = weight_values(r.weight, kGrid.pixel_centers());
  const double sum_omega = std::accumulate(omega.begin(), omega.end(), 0.0);
  CHECK(wkpi_kernel(imgs[0], imgs[0], r) == doctest::Approx(sum_omega));
  CHECK(wkpi_kernel(imgs[0], imgs[1], r) <= sum_omega);
  CHECK(wkpi_kernel(imgs[0], imgs[1], r) == wkpi_kernel(imgs[1], imgs[0], r));
  const WkpiParams alt{0.3, r.weight, KernelVariant::alt_wkpi};
  CHECK(alt_wkpi_kernel(imgs[0], imgs[0], alt) == doctest::Approx(16.0));

  CHECK_THROWS_AS(wkpi_kernel(a, imgs[0], r), InvalidArgument);
  CHECK_THROWS_AS((WkpiParams{0.0, r.weight, KernelVariant::wkpi}.validate()), InvalidArgument);
  CHECK(parse_kernel_variant("alt-wkpi") == KernelVariant::alt_wkpi);
  CHECK_THROWS_AS(parse_kernel_variant("rbf"), InvalidArgument);
}

TEST_CASE("gram matrix is symmetric and positive semi-definite") {
  Rng rng(2);
  for (auto variant : {KernelVariant::wkpi, KernelVariant::alt_wkpi}) {
    for (int t = 0; t < 5; ++t) {
      const auto imgs = random_images(20, rng);
      const WkpiParams p{0.05 + uniform_unit(rng), random_mixture(1 + uniform_index(rng, 4), rng), variant};
      const auto K = gram_matrix(imgs, p, 2);
      CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
      const double d0 = K(0, 0);
      for (Eigen::Index i = 0; i < K.rows(); ++i) CHECK(K(i, i) == doctest::Approx(d0));
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * K.cwiseAbs().maxCoeff());
      const auto C = cross_gram_matrix(std::span(imgs).subspan(0, 3), imgs, p);
      CHECK((C - K.topRows(3)).cwiseAbs().maxCoeff() <= 1e-12 * d0);
    }
  }
  const auto single = random_images(1, rng);
  const WkpiParams p{1.0, random_mixture(2, rng), KernelVariant::wkpi};
  const auto omega = weight_values(p.weight, kGrid.pixel_centers());
  CHECK(gram_matrix(single, p)(0, 0) == doctest::Approx(std::accumulate(omega.begin(), omega.end(), 0.0)));
}

TEST_CASE("distance properties and stability bound") {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const auto imgs = random_images(3, rng);
    const WkpiParams p{0.1 + uniform_unit(rng), random_mixture(3, rng), t % 2 ? KernelVariant::alt_wkpi : KernelVariant::wkpi};
    const double ab = wkpi_distance(imgs[0], imgs[1], p);
    const double bc = wkpi_distance(imgs[1], imgs[2], p);
    const double ac = wkpi_distance(imgs[0], imgs[2], p);
    CHECK(ab >= 0.0);
    CHECK(ab == doctest::Approx(wkpi_distance(imgs[1], imgs[0], p)));
    CHECK(ac <= ab + bc + 1e-12);
    CHECK(wkpi_distance(imgs[2], imgs[2], p) == 0.0);

    const auto omega = weight_values(p.weight, kGrid.pixel_centers());
    const double d2 = squared_distance_from_weights(imgs[0].pixels, imgs[1].pixels, omega, p.kernel_sigma, p.variant);
    CHECK(d2 == doctest::Approx(ab * ab).epsilon(1e-9));
    if (p.variant == KernelVariant::wkpi) {
      const double c = *std::max_element(omega.begin(), omega.end());
      double l2 = 0.0;
      for (std::size_t s = 0; s < omega.size(); ++s) l2 += std::pow(imgs[0].pixels[s] - imgs[1].pixels[s], 2);
      CHECK(d2 <= 2.0 * c / (p.kernel_sigma * p.kernel_sigma) * l2);
    }
  }
}

TEST_CASE("cost matrices") {
  SUBCASE("two objects in one class") {
    const auto g1 = GridSpec::from_bounds(0, 1, 0, 1, 1);
    const std::vector<PersistenceImage> imgs{image_of({0.0}, g1), image_of({1.0}, g1)};
    const auto p = one_pixel_params(1.0, KernelVariant::wkpi);
    const double d2 = 2 * (1 - std::exp(-0.5));
    const std::vector<int> y{0, 0};
    const auto cm = build_cost_matrices(imgs, y, 1, p);
    CHECK(cm.lambda(0, 1) == doctest::Approx(d2));
    CHECK(cm.lambda(0, 0) == 0.0);
    CHECK(cm.g(0, 0) == doctest::Approx(d2));
    CHECK(cm.h(0, 0) == doctest::Approx(1 / std::sqrt(2 * d2)));
    CHECK((cm.h * cm.g * cm.h.transpose())(0, 0) == doctest::Approx(1.0));
    CHECK(total_cost_matrix(cm, 1) == doctest::Approx(1.0));
    CHECK(total_cost_direct(imgs, y, 1, p) == doctest::Approx(1.0));

    const std::vector<int> split{0, 1};
    const auto cs = build_cost_matrices(imgs, split, 2, p);
    CHECK((cs.h * cs.l * cs.h.transpose()).trace() == doctest::Approx(2.0));
    CHECK(total_cost_direct(imgs, split, 2, p) == 0.0);

    const std::vector<PersistenceImage> same{imgs[0], imgs[0]};
    CHECK_THROWS_AS(build_cost_matrices(same, y, 1, p), DegenerateClassError);
    CHECK_THROWS_AS(validate_labels(std::vector<int>{0, 2}, 2), InvalidArgument);
    CHECK_THROWS_AS(validate_labels(std::vector<int>{0, 0}, 2), InvalidArgument);
  }

  SUBCASE("random instances") {
    Rng rng(4);
    for (int t = 0; t < 30; ++t) {
      const std::size_t n = 5 + uniform_index(rng, 26);
      const int k = 1 + static_cast<int>(uniform_index(rng, 4));
      const auto imgs = random_images(n, rng);
      const auto y = random_labels(n, k, rng);
      const WkpiParams p{0.2 + uniform_unit(rng), random_mixture(2, rng), t % 3 ? KernelVariant::wkpi : KernelVariant::alt_wkpi};
      const auto cm = build_cost_matrices(imgs, y, k, p);
      CHECK((cm.lambda - cm.lambda.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(cm.lambda.diagonal().cwiseAbs().maxCoeff() == 0.0);
      CHECK(cm.lambda.minCoeff() >= 0.0);
      CHECK(cm.l.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12 * cm.g.maxCoeff());
      const Eigen::MatrixXd hgh = cm.h * cm.g * cm.h.transpose();
      CHECK((hgh - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-8);

      Eigen::VectorXd v(static_cast<Eigen::Index>(n));
      for (auto& x : v) x = uniform_unit(rng) - 0.5;
      double quad = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          quad += 0.5 * cm.lambda(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                  std::pow(v(static_cast<Eigen::Index>(i)) - v(static_cast<Eigen::Index>(j)), 2);
      CHECK(v.dot(cm.l * v) == doctest::Approx(quad).epsilon(1e-10));

      const double direct = total_cost_direct(imgs, y, k, p);
      const double matrix = total_cost_matrix(cm, k);
      CHECK(std::abs(direct - matrix) <= 1e-8 * std::max(1.0, direct));
      CHECK(direct >= 0.0);
      CHECK(direct <= k + 1e-12);

      const CostModel model(imgs, y, k, p.kernel_sigma, p.variant);
      CHECK(model.evaluate(p.weight, false).total_cost == doctest::Approx(direct).epsilon(1e-10));
      const auto D2 = model.squared_distance_matrix(p.weight);
      CHECK((D2 - cm.lambda).cwiseAbs().maxCoeff() <= 1e-10 * cm.lambda.maxCoeff());

      // coefficient scaling leaves the cost unchanged
      auto scaled = p;
      for (auto& c : scaled.weight.components) c.coefficient *= 3.7;
      if (p.variant == KernelVariant::wkpi) CHECK(std::abs(total_cost_direct(imgs, y, k, scaled) - direct) <= 1e-10);
    }
  }
}

TEST_CASE("cost gradient matches central finite differences") {
  Rng rng(5);
  constexpr double kEps = 1e-5;
  int compared = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 6 + uniform_index(rng, 10);
    const int k = 2 + static_cast<int>(uniform_index(rng, 2));
    const auto imgs = random_images(n, rng);
    const auto y = random_labels(n, k, rng);
    const double c = t % 2 ? 1.0 : 0.0;
    WkpiParams p{0.2 + uniform_unit(rng), random_mixture(1 + uniform_index(rng, 3), rng),
                 t % 4 < 2 ? KernelVariant::wkpi : KernelVariant::alt_wkpi};
    const auto analytic = cost_gradient(imgs, y, k, p, c);
    auto objective = [&](const std::vector<double>& theta) {
      WkpiParams q = p;
      q.weight = GaussianMixtureWeight::from_parameters(theta);
      return total_cost_direct(imgs, y, k, q) + coefficient_penalty(q.weight, c);
    };
    const auto theta = p.weight.parameters();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto tp = theta, tm = theta;
      tp[i] += kEps;
      tm[i] -= kEps;
      const double fd = (objective(tp) - objective(tm)) / (2 * kEps);
      CHECK(std::abs(analytic[i] - fd) <= 1e-4 * std::max(std::abs(fd), 1e-6));
      ++compared;
    }
  }
  CHECK(compared > 200);
}

TEST_CASE("single-class gradient and penalty") {
  Rng rng(6);
  const auto imgs = random_images(8, rng);
  const std::vector<int> y(8, 0);
  const WkpiParams p{0.5, random_mixture(3, rng), KernelVariant::wkpi};
  for (double g : cost_gradient(imgs, y, 1, p, 0.0)) CHECK(g == 0.0);
  const auto pen = coefficient_penalty_gradient(p.weight, 2.5);
  const auto with = cost_gradient(imgs, y, 1, p, 2.5);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(pen[4 * r + 3] == doctest::Approx(-2.5 * std::exp(-p.weight.components[r].coefficient)));
    CHECK(pen[4 * r] == 0.0);
    CHECK(with[4 * r + 3] == pen[4 * r + 3]);
  }
  CHECK(coefficient_penalty(p.weight, 2.5) ==
        doctest::Approx(2.5 * (std::exp(-p.weight.components[0].coefficient) + std::exp(-p.weight.components[1].coefficient) +
                               std::exp(-p.weight.components[2].coefficient))));
}

TEST_CASE("cost model merges duplicates and subsets") {
  Rng rng(7);
  auto imgs = random_images(10, rng);
  auto y = random_labels(10, 2, rng);
  imgs.push_back(imgs[3]);
  y.push_back(y[3]);
  // a pixel constant over all images is pruned
  for (auto& im : imgs) im.pixels[5] = 0.25;
  const WkpiParams p{0.4, random_mixture(2, rng), KernelVariant::wkpi};
  const CostModel model(imgs, y, 2, p.kernel_sigma, p.variant);
  CHECK(model.image_count() == 11);
  CHECK(model.unit_count() == 10);
  CHECK(model.active_pixel_count() == 15);
  const auto full = model.evaluate(p.weight, true);
  CHECK(full.total_cost == doctest::Approx(total_cost_direct(imgs, y, 2, p)).epsilon(1e-10));
  const auto grad = cost_gradient(imgs, y, 2, p, 0.0);
  for (std::size_t i = 0; i < grad.size(); ++i) CHECK(full.gradient[i] == doctest::Approx(grad[i]).epsilon(1e-9));

  std::vector<std::size_t> all(11);
  std::iota(all.begin(), all.end(), 0);
  CHECK(model.evaluate_subset(p.weight, all, false).total_cost == doctest::Approx(full.total_cost).epsilon(1e-12));

  const std::vector<std::size_t> part{0, 1, 2, 4, 6, 8};
  std::vector<PersistenceImage> sub_imgs;
  std::vector<int> sub_y;
  for (auto i : part) {
    sub_imgs.push_back(imgs[i]);
    sub_y.push_back(y[i]);
  }
  int present = 0;
  for (int c = 0; c < 2; ++c) present += std::count(sub_y.begin(), sub_y.end(), c) > 0;
  if (present == 2) {
    CHECK(model.evaluate_subset(p.weight, part, false).total_cost ==
          doctest::Approx(total_cost_direct(sub_imgs, sub_y, 2, p)).epsilon(1e-10));
  }

  CostModelOptions uncached;
  uncached.cache_budget_bytes = 0;
  const CostModel slow(imgs, y, 2, p.kernel_sigma, p.variant, uncached);
  CHECK_FALSE(slow.cached());
  const auto e = slow.evaluate(p.weight, true);
  CHECK(e.total_cost == doctest::Approx(full.total_cost).epsilon(1e-12));
  for (std::size_t i = 0; i < grad.size(); ++i) CHECK(e.gradient[i] == doctest::Approx(full.gradient[i]).epsilon(1e-10));
}

TEST_CASE("initialization") {
  const BoundingBox box{0, 2, 1, 3};
  CHECK(init_random(box, 4, 9) == init_random(box, 4, 9));
  const auto one = init_random(box, 1, 3);
  CHECK(one.components[0].x >= 0);
  CHECK(one.components[0].x <= 2);
  CHECK(one.components[0].y >= 1);
  CHECK(one.components[0].y <= 3);
  CHECK(one.components[0].spread == doctest::Approx(box.diagonal()));
  CHECK(one.components[0].coefficient == 1.0);
  for (const auto& c : init_random(BoundingBox{1, 1, 2, 2}, 3, 5).components) {
    CHECK(c.x == 1);
    CHECK(c.y == 2);
    CHECK(c.spread > 0);
  }

  SUBCASE("k-means") {
    Rng rng(8);
    std::vector<Point2> pts;
    const std::vector<Point2> truth{{0, 0}, {10, 0}, {0, 10}};
    std::vector<Point2> means(3);
    for (std::size_t c = 0; c < 3; ++c) {
      for (int i = 0; i < 30; ++i) {
        const Point2 q{truth[c].x + uniform_unit(rng) - 0.5, truth[c].y + uniform_unit(rng) - 0.5};
        pts.push_back(q);
        means[c].x += q.x / 30;
        means[c].y += q.y / 30;
      }
    }
    const auto w = init_kmeans(pts, 3, 1, 0.01);
    for (const auto& m : means) {
      bool found = false;
      for (const auto& c : w.components) found |= std::hypot(c.x - m.x, c.y - m.y) <= 1e-6;
      CHECK(found);
    }
    for (const auto& c : w.components) {
      CHECK(c.coefficient == 1.0);
      CHECK(c.spread > 0.01);
      CHECK(c.spread < 1.0);
    }
    const auto single = init_kmeans(pts, 1, 1, 0.01);
    double mx = 0, my = 0;
    for (const auto& q : pts) {
      mx += q.x / 90;
      my += q.y / 90;
    }
    CHECK(single.components[0].x == doctest::Approx(mx));
    CHECK(single.components[0].y == doctest::Approx(my));

    const std::vector<Point2> few{{0, 0}, {1, 1}, {0, 0}};
    const auto dup = init_kmeans(few, 4, 2, 0.5);
    REQUIRE(dup.size() == 4);
    CHECK(dup.components[2] == dup.components[0]);
    CHECK(dup.components[3] == dup.components[1]);
    for (const auto& c : dup.components) CHECK(c.spread == 0.5);
  }

  SUBCASE("k-center") {
    const std::vector<Point2> line{{0, 0}, {1, 0}, {10, 0}};
    const auto w = init_kcenter_from(line, 2, 0, 0.1);
    CHECK(w.components[0].x == 0);
    CHECK(w.components[1].x == 10);
    CHECK(w.components[0].spread == 10);
    const auto seeded = init_kcenter(line, 1, 4, 0.1);
    bool is_point = false;
    for (const auto& q : line) is_point |= seeded.components[0].x == q.x && seeded.components[0].y == q.y;
    CHECK(is_point);
    CHECK(init_kcenter(line, 3, 4, 0.1) == init_kcenter(line, 3, 4, 0.1));
  }
  CHECK(parse_init_method("kcenter") == InitMethod::kcenter);
  CHECK_THROWS_AS(parse_init_method("spectral"), InvalidArgument);
}

TEST_CASE("trainer") {
  Rng rng(10);
  const WkpiParams p{0.5, {}, KernelVariant::wkpi};
  auto init = random_mixture(2, rng);

  SUBCASE("single class stops at once") {
    const auto imgs = random_images(6, rng);
    const auto r = train_metric(imgs, std::vector<int>(6, 0), 1, init, TrainConfig{}, p);
    CHECK(r.trace.size() == 1);
    CHECK(r.iterations == 1);
    CHECK(r.total_cost == doctest::Approx(1.0));
  }

  // two classes whose images differ in opposite corners
  std::vector<PersistenceImage> imgs;
  std::vector<int> y;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> px(kGrid.size());
    for (double& v : px) v = 0.3 * uniform_unit(rng);
    px[i % 2 ? 0 : 15] += 1.0;
    imgs.push_back(image_of(px));
    y.push_back(i % 2);
  }

  SUBCASE("infinite tolerance stops after one step") {
    TrainConfig cfg;
    cfg.cost_tolerance = std::numeric_limits<double>::infinity();
    const auto r = train_metric(imgs, y, 2, init, cfg, p);
    CHECK(r.iterations == 1);
    CHECK(r.trace.size() == 2);
  }

  SUBCASE("full batch decreases the cost") {
    TrainConfig cfg;
    cfg.cost_tolerance = 1e-8;
    const auto r = train_metric(imgs, y, 2, init, cfg, p);
    CHECK(r.trace.back().total_cost < r.trace.front().total_cost);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].objective <= r.trace[i - 1].objective);
    for (const auto& c : r.weight.components) {
      CHECK(c.coefficient >= 0.0);
      CHECK(c.spread > 0.0);
    }
    const auto again = train_metric(imgs, y, 2, init, cfg, p);
    CHECK(again.weight == r.weight);
    std::stringstream ss;
    write_trace_csv(ss, r.trace);
    CHECK(ss.str().rfind("iteration,total_cost,objective\n", 0) == 0);
  }

  SUBCASE("minibatch returns the best full evaluation") {
    TrainConfig cfg;
    cfg.minibatch_size = 8;
    cfg.max_iterations = 100;
    cfg.validation_interval = 10;
    cfg.rng_seed = 3;
    const auto r = train_metric(imgs, y, 2, init, cfg, p);
    double best = r.trace.front().objective;
    for (const auto& t : r.trace) best = std::min(best, t.objective);
    CHECK(r.objective == best);
    CHECK(r.objective <= r.trace.front().objective);
    const auto again = train_metric(imgs, y, 2, init, cfg, p);
    CHECK(again.weight == r.weight);
  }

  TrainConfig bad;
  bad.line_search.backtrack = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK(TrainConfig{}.batch_size(400) == 400);
  CHECK(TrainConfig{}.batch_size(600) == 256);
}

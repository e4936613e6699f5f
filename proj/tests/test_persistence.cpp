#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "oracles.hpp"
#include "wkpi/descriptors.hpp"
#include "wkpi/error.hpp"
#include "wkpi/persistence.hpp"

using namespace wkpi;

namespace {

std::vector<std::pair<double, double>> finite_pairs(const PersistenceDiagram& d, int dim = 0) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : d.points)
    if (!p.essential && p.dimension == dim) out.emplace_back(p.birth, p.death);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> essential_births(const PersistenceDiagram& d) {
  std::vector<double> out;
  for (const auto& p : d.points)
    if (p.essential && p.dimension == 0) out.push_back(p.birth);
  std::sort(out.begin(), out.end());
  return out;
}

DescriptorValues node_values(std::vector<double> v) { return {DescriptorKind::node, std::move(v)}; }

const Graph kPath(3, {{0, 1}, {1, 2}});

}  // namespace

TEST_CASE("sublevel filtration ordering") {
  const SimplexValues v{{1, 3, 2}, {3, 3}};
  const auto f = build_sublevel_filtration(kPath, v);
  REQUIRE(f.size() == 5);
  CHECK(f.entries[0].dimension == 0);
  CHECK(f.entries[0].index == 0);
  CHECK(f.entries[1].index == 2);
  CHECK(f.entries[2].index == 1);
  CHECK(f.entries[2].dimension == 0);
  CHECK(f.entries[3].dimension == 1);
  CHECK(f.entries[3].index == 0);
  CHECK(f.entries[4].index == 1);

  CHECK(build_sublevel_filtration(Graph(1, {}), SimplexValues{{5}, {}}).size() == 1);
  CHECK_THROWS_AS(build_sublevel_filtration(kPath, SimplexValues{{1, 3, 2}, {2, 3}}), InvalidArgument);
}

TEST_CASE("filtration invariants on random graphs") {
  Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    const auto g = oracle::random_graph(1 + uniform_index(rng, 10), 0.4, rng);
    const auto v = extend_node_to_edge(g, oracle::random_node_values(g, 4, rng));
    const auto f = build_sublevel_filtration(g, v);
    std::vector<std::size_t> pos(g.node_count());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto& e = f.entries[i];
      if (e.dimension == 0) pos[static_cast<std::size_t>(e.index)] = i;
      if (e.dimension == 1) {
        CHECK(pos[static_cast<std::size_t>(e.u)] < i);
        CHECK(pos[static_cast<std::size_t>(e.v)] < i);
      }
      if (i == 0) continue;
      const auto& p = f.entries[i - 1];
      CHECK(p.value <= e.value);
      if (p.value == e.value) {
        CHECK(p.dimension <= e.dimension);
        if (p.dimension == e.dimension) CHECK(p.index < e.index);
      }
    }
  }
}

TEST_CASE("0-dim sublevel examples") {
  const auto d = compute_0dim_sublevel(build_sublevel_filtration(kPath, {{1, 3, 2}, {3, 3}}));
  CHECK(finite_pairs(d) == std::vector<std::pair<double, double>>{{2, 3}});
  CHECK(essential_births(d) == std::vector<double>{1});

  const auto iso = compute_0dim_sublevel(build_sublevel_filtration(Graph(2, {}), {{1, 2}, {}}));
  CHECK(finite_pairs(iso).empty());
  CHECK(essential_births(iso) == std::vector<double>{1, 2});
  for (const auto& p : iso.points) CHECK(p.death == 2);  // capped at the global max

  const auto single = compute_0dim_sublevel(build_sublevel_filtration(Graph(1, {}), {{4}, {}}));
  CHECK(single.size() == 1);
  CHECK(single.count_essential(0) == 1);
}

TEST_CASE("0-dim superlevel") {
  // Top-down on (1,3,2): node c enters together with edge bc, node a with edge
  // ab, so both merges have zero persistence and no finite pair remains.
  const auto d = compute_0dim_superlevel(kPath, node_values({1, 3, 2}));
  CHECK(finite_pairs(d).empty());
  REQUIRE(d.count_essential(0) == 1);
  CHECK(d.points[0].birth == 3);
  CHECK(d.points[0].death == 1);

  // A valley between two peaks gives a finite superlevel pair with birth > death.
  const auto valley = compute_0dim_superlevel(kPath, node_values({3, 1, 2}));
  CHECK(finite_pairs(valley) == std::vector<std::pair<double, double>>{{2, 1}});
  CHECK(essential_births(valley) == std::vector<double>{3});

  const Graph tri(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(finite_pairs(compute_0dim_superlevel(tri, node_values({4, 4, 4}))).empty());

  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto g = oracle::random_graph(2 + uniform_index(rng, 9), 0.35, rng);
    auto f = oracle::random_node_values(g, 6, rng);
    auto neg = f;
    for (double& x : neg.values) x = -x;
    auto a = compute_0dim_superlevel(g, f);
    auto b = compute_0dim_sublevel(build_sublevel_filtration(g, extend_to_simplices(g, neg)));
    for (auto& p : b.points) {
      p.birth = -p.birth;
      p.death = -p.death;
    }
    a.sort();
    b.sort();
    CHECK(a == b);
  }
}

TEST_CASE("0-dim pairs match the boundary-matrix reduction") {
  Rng rng(77);
  for (int t = 0; t < 200; ++t) {
    const auto g = oracle::random_graph(1 + uniform_index(rng, 12), 0.3, rng);
    const auto v = extend_node_to_edge(g, oracle::random_node_values(g, 5, rng));
    const auto d = compute_0dim_sublevel(build_sublevel_filtration(g, v));
    CHECK(finite_pairs(d) == oracle::zero_dim_pairs_by_reduction(g, v));
    CHECK(d.count_essential(0) == g.component_count());
  }
}

TEST_CASE("extended persistence examples") {
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    const auto tree = [&] {
      std::vector<std::pair<int, int>> e;
      for (int i = 1; i < 10; ++i) e.emplace_back(static_cast<int>(uniform_index(rng, static_cast<std::size_t>(i))), i);
      return Graph(10, e);
    }();
    CHECK(compute_extended_persistence(tree, oracle::random_node_values(tree, 4, rng)).extended1.empty());
  }

  const Graph tri(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto e = compute_extended_persistence(tri, node_values({1, 2, 3}));
  REQUIRE(e.extended1.size() == 1);
  CHECK(e.extended1[0].birth == 3);
  CHECK(e.extended1[0].death == 1);
  REQUIRE(e.extended0.size() == 1);
  CHECK(e.extended0[0].birth == 1);
  CHECK(e.extended0[0].death == 3);
  CHECK(e.diagram().count(1) == 1);

  const Graph bowtie(5, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {2, 4}});
  CHECK(compute_extended_persistence(bowtie, degree_function(bowtie)).diagram().count(1) == 2);
}

TEST_CASE("extended persistence counting and consistency") {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const auto g = oracle::random_graph(1 + uniform_index(rng, 12), 0.35, rng);
    const auto f = oracle::random_node_values(g, 5, rng);
    const auto ext = compute_extended_persistence(g, f);
    const auto d = ext.diagram();
    CHECK(d.count(1) == static_cast<std::size_t>(oracle::cycle_rank(g)));
    CHECK(ext.extended0.size() == g.component_count());
    for (const auto& p : d.points) CHECK(p.persistence() >= 0.0);

    const auto uf = compute_0dim_sublevel(build_sublevel_filtration(g, extend_to_simplices(g, f)));
    std::vector<std::pair<double, double>> ordinary;
    for (const auto& p : ext.ordinary0) ordinary.emplace_back(p.birth, p.death);
    std::sort(ordinary.begin(), ordinary.end());
    CHECK(ordinary == finite_pairs(uf));

    // per component (min, max)
    const auto comp = g.component_labels();
    std::vector<std::pair<double, double>> expect(g.component_count(), {1e300, -1e300});
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      auto& [lo, hi] = expect[static_cast<std::size_t>(comp[v])];
      lo = std::min(lo, f.values[v]);
      hi = std::max(hi, f.values[v]);
    }
    std::sort(expect.begin(), expect.end());
    std::vector<std::pair<double, double>> got;
    for (const auto& p : ext.extended0) got.emplace_back(p.birth, p.death);
    std::sort(got.begin(), got.end());
    CHECK(got == expect);
  }
}

TEST_CASE("shift and scale equivariance") {
  Rng rng(12);
  for (int t = 0; t < 40; ++t) {
    const auto g = oracle::random_graph(2 + uniform_index(rng, 9), 0.4, rng);
    const auto f = oracle::random_node_values(g, 5, rng);
    auto base = compute_extended_persistence(g, f).diagram();
    base.sort();
    // shifts and scales that are exact in binary floating point
    for (auto [c, lambda] : {std::pair{0.5, 1.0}, std::pair{-3.0, 1.0}, std::pair{0.0, 2.0}, std::pair{0.0, 0.25}}) {
      auto h = f;
      for (double& x : h.values) x = lambda * x + c;
      auto d = compute_extended_persistence(g, h).diagram();
      d.sort();
      REQUIRE(d.size() == base.size());
      for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d.points[i].birth == lambda * base.points[i].birth + c);
        CHECK(d.points[i].death == lambda * base.points[i].death + c);
        CHECK(d.points[i].dimension == base.points[i].dimension);
      }
    }
  }
}

TEST_CASE("determinism with ties") {
  const Graph g(6, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {3, 4}, {4, 5}, {5, 3}});
  const auto f = node_values({1, 1, 1, 1, 1, 1});
  const auto a = compute_extended_persistence(g, f).diagram();
  const auto b = compute_extended_persistence(g, f).diagram();
  CHECK(a == b);
  CHECK(a.count(1) == 2);
}

TEST_CASE("merge and csv round trip") {
  PersistenceDiagram d{{{1, 2, 0, false}, {0.1, 3, 0, true}, {3, 1, 1, true}}};
  CHECK(merge_diagrams(d, {}) == d);
  CHECK(merge_diagrams(d, d).size() == 6);
  CHECK(merge_diagrams(d, PersistenceDiagram{{{5, 6, 1, false}}}).size() == 4);
  CHECK(drop_essential(d).size() == 1);

  std::stringstream ss;
  write_diagram_csv(ss, d);
  CHECK(ss.str().rfind("birth,death,dim,essential\n", 0) == 0);
  CHECK(read_diagram_csv(ss) == d);
}

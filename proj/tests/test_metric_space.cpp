#include <doctest.h>

#include <cmath>

#include "robayes/metric_space.hpp"
#include "robayes/rng.hpp"

using namespace robayes;

namespace {

SpacePtr random_cloud(RngStream& rng, std::size_t n, std::size_t dim) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim, 0.0));
  for (auto& p : pts)
    for (double& c : p) c = 3.0 * rng.next_unit();
  return build_grid_space(pts);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(i + 1 == n ? hi
                             : lo + (hi - lo) * static_cast<double>(i) /
                                        static_cast<double>(n - 1));
  return out;
}

}  // namespace

TEST_CASE("grid space construction") {
  auto two = build_line_space({0.0, 1.0});
  CHECK(two->size() == 2);
  CHECK(two->dist(0, 1) == 1.0);
  CHECK(two->dist(1, 0) == 1.0);
  CHECK(two->dist(0, 0) == 0.0);

  auto three = build_line_space({0.0, 0.5, 1.0});
  CHECK(three->dist(0, 2) == 1.0);
  CHECK(three->dist(0, 1) == 0.5);

  auto grid = build_line_space(linspace(0.0, 1.0, 101));
  CHECK(grid->diameter() == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(build_grid_space({}), PreconditionError);
  CHECK_THROWS_AS(build_grid_space({{0.0}, {0.0, 1.0}}), PreconditionError);
}

TEST_CASE("constructed matrices must be metric") {
  // asymmetric
  CHECK_THROWS_AS(FiniteMetricSpace({"a", "b"}, {0, 1, 2, 0}), InvariantError);
  // nonzero diagonal
  CHECK_THROWS_AS(FiniteMetricSpace({"a", "b"}, {0.5, 1, 1, 0}),
                  InvariantError);
  // triangle violation: d(0,2)=5 > 1+1
  CHECK_THROWS_AS(
      FiniteMetricSpace({"a", "b", "c"}, {0, 1, 5, 1, 0, 1, 5, 1, 0}),
      InvariantError);
  // a slack-sized violation passes
  const double d02 = 2.0 + 0.5e-9;
  CHECK_NOTHROW(
      FiniteMetricSpace({"a", "b", "c"}, {0, 1, d02, 1, 0, 1, d02, 1, 0}));
}

TEST_CASE("enlargement conventions") {
  auto s = build_line_space({0.0, 0.5, 1.0});
  CHECK(enlarge(*s, IndexSet{0}, 0.6, true) == IndexSet{0, 1});
  CHECK(enlarge(*s, IndexSet{0}, 0.0, true).empty());
  CHECK(enlarge(*s, IndexSet{0}, 0.5, false) == IndexSet{0, 1});
  CHECK(enlarge(*s, IndexSet{0}, 0.0, false) == IndexSet{0});
  CHECK_THROWS_AS(enlarge(*s, IndexSet{0}, -0.1, true), PreconditionError);
  CHECK_THROWS_AS(enlarge(*s, IndexSet{7}, 0.1, true), PreconditionError);
}

TEST_CASE("enlargement monotonicity and saturation") {
  RngStream rng(2024, 0, 1);
  for (int round = 0; round < 40; ++round) {
    auto s = random_cloud(rng, 2 + rng.next_below(10), 1 + rng.next_below(3));
    std::vector<std::size_t> a_idx{rng.next_below(s->size())};
    for (std::size_t i = 0; i < s->size(); ++i)
      if (rng.next_unit() < 0.3) a_idx.push_back(i);
    IndexSet a(a_idx);
    const double e1 = rng.next_unit() * s->diameter();
    const double e2 = e1 + rng.next_unit() * s->diameter();
    for (bool open : {true, false}) {
      const IndexSet small = enlarge(*s, a, e1, open);
      const IndexSet big = enlarge(*s, a, e2, open);
      for (std::size_t i : small) CHECK(big.contains(i));
      CHECK(enlarge(*s, a, s->diameter() + 1.0, open).size() == s->size());
    }
    // A is contained in its own closed enlargement at any radius, and in
    // the open one for positive radius.
    for (std::size_t i : a) {
      CHECK(enlarge(*s, a, 0.0, false).contains(i));
      CHECK(enlarge(*s, a, 1e-12, true).contains(i));
    }
  }
}

TEST_CASE("diameter") {
  CHECK(diameter(*build_line_space({1.0, 4.0})) == 3.0);
  CHECK(diameter(*build_line_space({2.5})) == 0.0);
  CHECK(diameter(*build_line_space(linspace(0.0, 1.0, 101))) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("metric axioms hold on random point clouds") {
  RngStream rng(7, 0, 2);
  for (int round = 0; round < 30; ++round) {
    auto s = random_cloud(rng, 2 + rng.next_below(14), 1 + rng.next_below(3));
    // construction validates the axioms; spot-check symmetry by hand
    for (std::size_t i = 0; i < s->size(); ++i)
      for (std::size_t j = 0; j < s->size(); ++j)
        CHECK(s->dist(i, j) == s->dist(j, i));
  }
}

TEST_CASE("subspace keeps distances") {
  auto s = build_line_space({0.0, 0.25, 0.5, 1.0});
  const std::vector<std::size_t> keep{0, 2, 3};
  const FiniteMetricSpace sub = s->subspace(keep);
  CHECK(sub.size() == 3);
  CHECK(sub.dist(0, 1) == 0.5);
  CHECK(sub.dist(1, 2) == 0.5);
  CHECK(sub.label(2) == s->label(3));
}

TEST_CASE("index sets sort and dedupe") {
  IndexSet a({3, 1, 3, 2});
  CHECK(a.size() == 3);
  CHECK(a.members() == std::vector<std::size_t>{1, 2, 3});
  CHECK(a.contains(2));
  CHECK(!a.contains(0));
}

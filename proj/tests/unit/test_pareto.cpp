#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "chipletrank/error.hpp"
#include "chipletrank/pareto.hpp"
#include "oracles.hpp"

using namespace chipletrank;
namespace t = chipletrank::testing;

namespace {

ScatterSet pts(std::initializer_list<std::pair<double, double>> values) {
  ScatterSet out;
  int i = 0;
  for (const auto& [temp, wl] : values) out.push_back({PlacementOrder({i++}), temp, wl});
  return out;
}

std::vector<std::size_t> all_of(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_SUITE("pareto") {

TEST_CASE("front examples") {
  CHECK(pareto_front(pts({{80, 50}})) == std::vector<std::size_t>{0});
  CHECK(pareto_front(pts({{80, 50}, {90, 60}})) == std::vector<std::size_t>{0});
  CHECK(pareto_front(pts({{80, 60}, {90, 50}, {85, 55}})) == all_of(3));
  CHECK(pareto_front(pts({{80, 50}, {80, 50}, {90, 60}})) == std::vector<std::size_t>{0, 1});
  CHECK(pareto_front(pts({{80, 50}, {80, 60}})) == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(pareto_front(ScatterSet{}), Error);
}

TEST_CASE("front matches the pairwise definition") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const ScatterSet s = t::random_scatter(1 + rng.below(120), rng);
    CHECK(pareto_front(s) == t::brute_front(s));
  }
}

TEST_CASE("corner sets") {
  const CornerSets a = corner_sets(pts({{80, 50}, {90, 60}}));
  CHECK(a.minimal == std::vector<std::size_t>{0});
  CHECK(a.maximal == std::vector<std::size_t>{1});
  CHECK(a.spread_t == doctest::Approx(10.0));
  CHECK(a.spread_wl == doctest::Approx(10.0));

  const CornerSets same = corner_sets(pts({{85, 70}, {85, 70}, {85, 70}}));
  CHECK(same.spread_t == 0.0);
  CHECK(same.spread_wl == 0.0);

  const CornerSets anti = corner_sets(pts({{80, 60}, {90, 50}}));
  CHECK(anti.minimal == all_of(2));
  CHECK(anti.maximal == all_of(2));
  CHECK(anti.spread_t == 0.0);
  CHECK(anti.spread_wl == 0.0);

  CHECK_THROWS_AS(corner_sets(ScatterSet{}), Error);
}

TEST_CASE("slack closed form") {
  const ScatterSet s = pts({{80, 50}, {90, 60}});
  const CornerSets c = corner_sets(s);
  CHECK(slack(s, c, 0) == 0.0);
  CHECK(slack(s, c, 1) == doctest::Approx(1.0));

  // Point 1 shares point 0's temperature: it is off the front yet has no
  // dominator that is strictly better in both objectives, so its slack is 0.
  const ScatterSet w = pts({{80, 50}, {80, 60}, {90, 70}});
  const CornerSets cw = corner_sets(w);
  CHECK(slack(w, cw, 1) == 0.0);
  CHECK(slack(w, cw, 2) == doctest::Approx(1.0));
}

TEST_CASE("slack equals the delta-grid brute force") {
  Rng rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    const ScatterSet s = t::random_scatter(200, rng);
    const CornerSets c = corner_sets(s);
    REQUIRE(c.spread_t > 0.0);
    REQUIRE(c.spread_wl > 0.0);
    const LabeledScatter labeled = assign_levels(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double grid = t::grid_min_delta(s, i, c.spread_t, c.spread_wl);
      const double d = slack(s, c, i);
      CHECK(d <= grid + 1e-12);
      CHECK(d > grid - 0.001 - 1e-12);
      CHECK(labeled.slack[i] == d);
      CHECK(labeled.level[i] == t::oracle_level(s, i, c.spread_t, c.spread_wl));
    }
  }
}

TEST_CASE("level buckets") {
  CHECK(level_from_slack(0.0) == 10);
  CHECK(level_from_slack(0.0999) == 10);
  CHECK(level_from_slack(0.1) == 9);
  CHECK(level_from_slack(0.3) == 7);
  CHECK(level_from_slack(0.7) == 3);
  CHECK(level_from_slack(0.95) == 1);
  CHECK(level_from_slack(1.0) == 0);
  CHECK(level_from_slack(7.5) == 0);
  for (int k = 0; k <= 10; ++k) CHECK(level_from_slack(k / 10.0) == 10 - k);
}

TEST_CASE("assign_levels") {
  const LabeledScatter front = assign_levels(pts({{80, 60}, {90, 50}, {85, 55}, {70, 70}}));
  CHECK(front.level == std::vector<int>{10, 10, 10, 10});

  // d = 1.0 exactly maps to level 0.
  const LabeledScatter two = assign_levels(pts({{80, 50}, {90, 60}}));
  CHECK(two.slack[1] == 1.0);
  CHECK(two.level == std::vector<int>{10, 0});
  CHECK_FALSE(two.degenerate_spread);

  const LabeledScatter flat = assign_levels(pts({{85, 70}, {85, 70}}));
  CHECK(flat.level == std::vector<int>{10, 10});
  CHECK_FALSE(flat.degenerate_spread);

  const LabeledScatter anti = assign_levels(pts({{80, 60}, {90, 50}}));
  CHECK(anti.degenerate_spread);
  CHECK(anti.slack == std::vector<double>{0.0, 0.0});

  CHECK_THROWS_AS(assign_levels(ScatterSet{}), Error);
}

TEST_CASE("negative spread is treated as degenerate") {
  // The hot low-WL points all sit on P while Q's mean temperature is low.
  const ScatterSet s = pts({{99, 0}, {98, 1}, {97, 2}, {96, 3}, {0, 50}, {99.5, 10}, {1, 60}});
  const CornerSets c = corner_sets(s);
  CHECK(c.minimal == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(c.maximal == std::vector<std::size_t>{5, 6});
  CHECK(c.spread_t == doctest::Approx(-27.75));
  CHECK(c.spread_wl > 0.0);
  const LabeledScatter labeled = assign_levels(s);
  CHECK(labeled.degenerate_spread);
  CHECK(labeled.level == std::vector<int>(7, 10));
}

TEST_CASE("histogram of a full sweep sums to 720") {
  const LabeledScatter l = assign_levels(sweep(t::bundled_system("case3"), OrderSource::all()));
  const auto hist = level_histogram(l);
  REQUIRE(hist.size() == 11);
  CHECK(std::accumulate(hist.begin(), hist.end(), std::size_t{0}) == 720);
}

TEST_CASE("level 10 is exactly the d < 0.1 set and contains the front") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const ScatterSet s = t::random_scatter(20 + rng.below(150), rng);
    const LabeledScatter l = assign_levels(s);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK((l.level[i] == 10) == (l.slack[i] < 0.1));
    for (std::size_t i : pareto_front(s)) {
      CHECK(l.slack[i] == 0.0);
      CHECK(l.level[i] == 10);
    }
  }
}

TEST_CASE("raising one temperature never lowers its slack") {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    ScatterSet s = t::random_scatter(40, rng);
    const std::size_t i = rng.below(s.size());
    const CornerSets fixed = corner_sets(s);
    const double before = slack(s, fixed, i);
    s[i].temperature_c += rng.uniform(0.1, 10.0);
    CHECK(slack(s, fixed, i) >= before);
  }
}

TEST_CASE("slack is invariant under rescaling either objective") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ScatterSet s = t::random_scatter(30 + rng.below(100), rng);
    const double alpha = rng.uniform(0.1, 10.0);
    const double beta = rng.uniform(0.1, 10.0);
    ScatterSet scaled = s;
    for (auto& p : scaled) {
      p.temperature_c *= alpha;
      p.wirelength_mm *= beta;
    }
    const LabeledScatter a = assign_levels(s);
    const LabeledScatter b = assign_levels(scaled);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(b.slack[i] == doctest::Approx(a.slack[i]).epsilon(1e-9));
    }
    CHECK(a.level == b.level);
  }
}

}  // TEST_SUITE

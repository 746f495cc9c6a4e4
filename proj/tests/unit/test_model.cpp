#include <doctest.h>

#include <cmath>
#include <numeric>

#include "chipletrank/error.hpp"
#include "chipletrank/model.hpp"
#include "chipletrank/pareto.hpp"
#include "oracles.hpp"

using namespace chipletrank;
namespace t = chipletrank::testing;

namespace {

OrderGraph permuted(const OrderGraph& g, const std::vector<int>& to) {
  OrderGraph out = g;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) out.nodes[to[v]] = g.nodes[v];
  for (auto& e : out.edges) {
    e.a = to[e.a];
    e.b = to[e.b];
  }
  return out;
}

Matrix rows_of(std::initializer_list<std::vector<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) m(r, c) = row[c];
    ++r;
  }
  return m;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("layer stack") {
  const auto& shapes = layer_shapes();
  const std::size_t in[] = {7, 7, 32, 64, 64, 32, 16};
  const std::size_t out[] = {7, 32, 64, 64, 32, 16, 1};
  std::size_t offset = 0;
  for (std::size_t l = 0; l < kLayers; ++l) {
    CHECK(shapes[l].in == in[l]);
    CHECK(shapes[l].out == out[l]);
    CHECK(shapes[l].graph == (l < 3));
    CHECK(shapes[l].fan_in == (l < 3 ? 2 * in[l] : in[l]));
    CHECK(shapes[l].weight_offset == offset);
    offset += shapes[l].fan_in * shapes[l].out;
    CHECK(shapes[l].bias_offset == offset);
    offset += shapes[l].out;
  }
  CHECK(parameter_count() == offset);
  CHECK(parameter_count() == 11530);
}

TEST_CASE("pooling names") {
  CHECK(parse_pooling("max") == Pooling::Max);
  CHECK(to_string(Pooling::Sum) == "sum");
  CHECK_THROWS_AS(parse_pooling("avg"), Error);
}

TEST_CASE("sage layer: isolated node with identity blocks is a ReLU") {
  const std::vector<double> w{1, 0, 1, 0, 0, 1, 0, 1};
  const std::vector<double> b{0, 0};
  const Matrix h = rows_of({{1.0, -2.0}});
  const Matrix out = sage_forward(w, b, 2, 2, h, make_neighborhood(1, {}));
  CHECK(out(0, 0) == 1.0);
  CHECK(out(0, 1) == 0.0);
}

TEST_CASE("sage layer: symmetric pair") {
  Rng rng(1);
  std::vector<double> w(3 * 6);
  for (double& x : w) x = rng.uniform(-1, 1);
  const std::vector<double> b{0.1, 0.2, 0.3};
  const Matrix h = rows_of({{0.5, 0.2, 0.9}, {0.5, 0.2, 0.9}});
  const std::vector<GraphEdge> edges{{0, 1, 4.0}};
  const Matrix out = sage_forward(w, b, 3, 3, h, make_neighborhood(2, edges));
  for (std::size_t c = 0; c < 3; ++c) CHECK(out(0, c) == out(1, c));
}

TEST_CASE("sage layer: weighted path by hand") {
  // Path 0 -(1)- 1 -(3)- 2.
  const std::vector<double> w{1, 2, -1, 0.5, 0, -1, 1, 1};
  const std::vector<double> b{0.1, -0.2};
  const Matrix h = rows_of({{1, 0}, {0, 1}, {2, 2}});
  const std::vector<GraphEdge> edges{{0, 1, 1.0}, {1, 2, 3.0}};
  const Matrix out = sage_forward(w, b, 2, 2, h, make_neighborhood(3, edges));
  // agg0 = (0,1); agg1 = (1*(1,0) + 3*(2,2)) / 4 = (1.75, 1.5); agg2 = (0,1).
  CHECK(out(0, 0) == doctest::Approx(1.6));
  CHECK(out(0, 1) == doctest::Approx(0.8));
  CHECK(out(1, 0) == doctest::Approx(1.1));
  CHECK(out(1, 1) == doctest::Approx(2.05));
  CHECK(out(2, 0) == doctest::Approx(6.6));
  CHECK(out(2, 1) == 0.0);
}

TEST_CASE("sage layer rejects shape errors") {
  const std::vector<double> w(8, 0.0);
  const std::vector<double> b(2, 0.0);
  const Matrix h = rows_of({{1, 2, 3}});
  CHECK_THROWS_AS(sage_forward(w, b, 2, 2, h, make_neighborhood(1, {})), Error);
  const std::vector<GraphEdge> bad{{0, 3, 1.0}};
  CHECK_THROWS_AS(make_neighborhood(2, bad), Error);
  const std::vector<GraphEdge> loop{{1, 1, 1.0}};
  CHECK_THROWS_AS(make_neighborhood(2, loop), Error);
}

TEST_CASE("pooling") {
  const Matrix one = rows_of({{1.5, -2.0, 3.0}});
  CHECK(pool(one, Pooling::Mean) == pool(one, Pooling::Sum));
  CHECK(pool(one, Pooling::Max) == pool(one, Pooling::Sum));

  const Matrix two = rows_of({{0, 0, 0}, {2, 2, 2}});
  CHECK(pool(two, Pooling::Mean) == std::vector<double>{1, 1, 1});
  CHECK(pool(two, Pooling::Sum) == std::vector<double>{2, 2, 2});
  CHECK(pool(two, Pooling::Max) == std::vector<double>{2, 2, 2});

  CHECK_THROWS_AS(pool(Matrix(0, 3), Pooling::Mean), Error);

  Rng rng(2);
  Matrix five(5, 4);
  for (double& x : five.data) x = rng.uniform(-1, 1);
  Matrix shuffled(5, 4);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 4; ++c) shuffled(perm[r], c) = five(r, c);
  }
  const auto a = pool(five, Pooling::Mean);
  const auto b = pool(shuffled, Pooling::Mean);
  for (std::size_t c = 0; c < 4; ++c) CHECK(a[c] == doctest::Approx(b[c]).epsilon(1e-14));
  CHECK(pool(five, Pooling::Max) == pool(shuffled, Pooling::Max));
}

TEST_CASE("scoring") {
  Rng rng(3);
  RankModel zero;
  for (int i = 0; i < 5; ++i) CHECK(score_graph(zero, t::random_graph(2 + rng.below(5), rng)) == 0.0);

  for (Pooling mode : {Pooling::Mean, Pooling::Sum, Pooling::Max}) {
    const RankModel m = init_model(mode, 17);
    for (int trial = 0; trial < 5; ++trial) {
      const OrderGraph g = t::random_graph(3 + rng.below(5), rng);
      std::vector<int> to(g.nodes.size());
      std::iota(to.begin(), to.end(), 0);
      for (std::size_t i = to.size(); i > 1; --i) std::swap(to[i - 1], to[rng.below(i)]);
      const double s = score_graph(m, g);
      CHECK(std::isfinite(s));
      CHECK(score_graph(m, permuted(g, to)) == doctest::Approx(s).epsilon(1e-12));
      CHECK(score_graph(m, g) == s);
      CHECK(score_graph(init_model(mode, 17), g) == s);
    }
  }
  OrderGraph empty;
  CHECK_THROWS_AS(score_graph(init_model(Pooling::Mean, 1), empty), Error);
}

TEST_CASE("pair loss") {
  CHECK(pair_loss(1.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(pair_loss(3.0, 1.0) == doctest::Approx(0.126928011043).epsilon(1e-11));
  const double tail = pair_loss(0.0, 50.0);
  CHECK(std::isfinite(tail));
  CHECK(tail == doctest::Approx(50.0).epsilon(1e-15));
  CHECK(std::isfinite(pair_loss(0.0, 1e6)));
  CHECK(pair_loss(1e6, 0.0) == 0.0);
  CHECK(pair_loss_slope(2.0, 2.0) == -0.5);
  CHECK(pair_loss_slope(3.0, 1.0) == doctest::Approx(-1.0 / (1.0 + std::exp(2.0))));

  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(-20, 20);
    const double b = rng.uniform(-20, 20);
    const double c = rng.uniform(-5, 5);
    CHECK(pair_loss(a, b) + pair_loss(b, a) >= 2.0 * std::log(2.0));
    CHECK(pair_loss(a + c, b + c) == doctest::Approx(pair_loss(a, b)).epsilon(1e-9));
  }
  CHECK(pair_loss(0.25, 0.25) + pair_loss(0.25, 0.25) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(5);
  for (std::uint64_t seed : {1u, 2u}) {
    const Pooling mode = seed == 1 ? Pooling::Mean : Pooling::Max;
    const RankModel m = init_model(mode, seed);
    const OrderGraph strong = t::random_graph(4, rng);
    const OrderGraph weak = t::random_graph(4, rng);
    const auto check = t::check_pair_gradient(m, strong, weak);
    CHECK(check.max_rel_error <= 1e-4);
    CHECK(check.checked + check.kinks == parameter_count());
    CHECK(check.checked > parameter_count() / 2);
  }
}

TEST_CASE("zero-weight model gradients") {
  Rng rng(6);
  RankModel zero;
  const OrderGraph g = t::random_graph(4, rng);
  ForwardCache cache;
  CHECK(forward(zero, g, cache) == 0.0);
  std::vector<double> grad(parameter_count(), 0.0);
  backward_score(zero, cache, 1.0, grad);
  const LayerShape& last = layer_shapes()[kLayers - 1];
  const LayerShape& first = layer_shapes()[0];
  CHECK(grad[last.bias_offset] == 1.0);
  for (std::size_t i = first.weight_offset; i < first.bias_offset; ++i) REQUIRE(grad[i] == 0.0);

  // Finite-difference spot check on the output bias.
  RankModel probe = zero;
  probe.params[last.bias_offset] = 1e-5;
  const double up = score_graph(probe, g);
  probe.params[last.bias_offset] = -1e-5;
  const double down = score_graph(probe, g);
  CHECK((up - down) / 2e-5 == doctest::Approx(1.0));

  // Identical twin scores: the pair slope is -1/2 and the shared-bias terms cancel.
  std::vector<double> pair_grad(parameter_count(), 0.0);
  CHECK(pair_gradient(zero, g, g, pair_grad) == doctest::Approx(std::log(2.0)));
  CHECK(pair_grad[last.bias_offset] == 0.0);
}

TEST_CASE("adam") {
  AdamConfig cfg;
  cfg.lr = 0.1;
  for (double g : {0.5, -3.0, 1e-3}) {
    std::vector<double> p{1.0};
    AdamState s(1);
    adam_step(p, std::vector<double>{g}, s, cfg);
    CHECK(p[0] == doctest::Approx(1.0 - 0.1 * (g > 0 ? 1.0 : -1.0)).epsilon(1e-6));
  }

  std::vector<double> still{2.0, -1.0};
  AdamState s0(2);
  for (int i = 0; i < 10; ++i) adam_step(still, std::vector<double>{0.0, 0.0}, s0, cfg);
  CHECK(still == std::vector<double>{2.0, -1.0});

  // Two steps with g = 0.5: m = 0.05, 0.095; v = 2.5e-4, 4.9975e-4; both
  // bias-corrected ratios equal 0.5 / 0.5, so each step moves theta by lr.
  std::vector<double> theta{1.0};
  AdamState s(1);
  adam_step(theta, std::vector<double>{0.5}, s, cfg);
  CHECK(s.step == 1);
  CHECK(s.m[0] == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(s.v[0] == doctest::Approx(2.5e-4).epsilon(1e-14));
  CHECK(theta[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));
  adam_step(theta, std::vector<double>{0.5}, s, cfg);
  CHECK(s.m[0] == doctest::Approx(0.095).epsilon(1e-14));
  CHECK(s.v[0] == doctest::Approx(4.9975e-4).epsilon(1e-14));
  CHECK(theta[0] == doctest::Approx(1.0 - 2 * 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-12));

  std::vector<double> p{1.0, 2.0};
  AdamState wrong(1);
  CHECK_THROWS_AS(adam_step(p, std::vector<double>{1.0, 1.0}, wrong, cfg), Error);
}

TEST_CASE("training fits a separable pair") {
  Rng rng(7);
  OrderGraph weak = t::random_graph(3, rng);
  OrderGraph strong = weak;
  strong.nodes[0][kPower] = weak.nodes[0][kPower] > 0.5 ? 0.0 : 1.0;
  const std::vector<OrderGraph> graphs{strong, weak};
  const std::vector<GraphPair> pairs{{0, 1}};
  TrainConfig cfg;
  const RankModel m = train(graphs, pairs, FeatureScaler{}, cfg);
  REQUIRE(m.meta.loss_history.size() == 3000);
  CHECK(m.meta.loss_history.back() < 0.1);
  CHECK(score_graph(m, strong) > score_graph(m, weak));
}

TEST_CASE("training is deterministic and thread-count independent") {
  const ChipletSystem s = t::bundled_system("case2");
  const LabeledScatter l = assign_levels(sweep(s, OrderSource::sampled(60, 1)));
  std::vector<LabeledCase> cases{{s.name, &l}};
  const auto pairs = sample_pairs(cases, SamplingConfig{5, 2});
  std::vector<OrderGraph> graphs;
  for (std::size_t i = 0; i < l.points.size(); ++i) graphs.push_back(build_graph(s, l.points[i].order, l.level[i]));
  const FeatureScaler scaler = fit_scaler(graphs);
  for (auto& g : graphs) g = apply_scaler(std::move(g), scaler);
  std::vector<GraphPair> gp;
  for (const auto& p : pairs) gp.push_back({p.strong_index, p.weak_index});

  TrainConfig cfg;
  cfg.iterations = 40;
  cfg.batch = 20;
  const RankModel a = train(graphs, gp, scaler, cfg);
  cfg.threads = 3;
  const RankModel b = train(graphs, gp, scaler, cfg);
  CHECK(a.params == b.params);
  CHECK(a.meta.loss_history == b.meta.loss_history);
  for (double loss : a.meta.loss_history) CHECK(std::isfinite(loss));
  cfg.seed = 43;
  CHECK(train(graphs, gp, scaler, cfg).params != a.params);
}

TEST_CASE("training input validation") {
  Rng rng(8);
  const std::vector<OrderGraph> graphs{t::random_graph(3, rng), t::random_graph(3, rng)};
  const std::vector<GraphPair> pairs{{0, 1}};
  CHECK_THROWS_AS(train(graphs, std::vector<GraphPair>{}, FeatureScaler{}, TrainConfig{}), Error);
  try {
    train(graphs, std::vector<GraphPair>{}, FeatureScaler{}, TrainConfig{});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyDataset);
  }
  TrainConfig bad;
  bad.adam.lr = 0.0;
  CHECK_THROWS_AS(train(graphs, pairs, FeatureScaler{}, bad), Error);
  bad = TrainConfig{};
  bad.batch = 0;
  CHECK_THROWS_AS(train(graphs, pairs, FeatureScaler{}, bad), Error);
  bad = TrainConfig{};
  bad.iterations = 0;
  CHECK_THROWS_AS(train(graphs, pairs, FeatureScaler{}, bad), Error);
}

}  // TEST_SUITE

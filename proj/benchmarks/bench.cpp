#include <benchmark/benchmark.h>

#include "chipletrank/dataset.hpp"
#include "chipletrank/model.hpp"
#include "chipletrank/pareto.hpp"
#include "chipletrank/placer.hpp"
#include "chipletrank/ranking.hpp"
#include "chipletrank/system.hpp"

using namespace chipletrank;

namespace {

const ChipletSystem& bundled() {
  static const ChipletSystem system =
      parse_system(std::string(CHIPLETRANK_BENCH_DATA_DIR) + "/systems/case1.json");
  return system;
}

RankModel scaled_model(Pooling pooling) {
  RankModel m = init_model(pooling, 42);
  std::vector<OrderGraph> graphs;
  for (const PlacementOrder& o : all_orders(bundled().size())) graphs.push_back(build_graph(bundled(), o, 0));
  m.scaler = fit_scaler(graphs);
  return m;
}

void BM_PlaceOne(benchmark::State& state) {
  const PlacementOrder order = PlacementOrder::identity(bundled().size());
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_order(bundled(), order));
}
BENCHMARK(BM_PlaceOne);

void BM_FullSweep(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(bundled(), OrderSource::all(), {}, {}, threads));
}
BENCHMARK(BM_FullSweep)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_AssignLevels(benchmark::State& state) {
  const ScatterSet points = sweep(bundled(), OrderSource::all());
  for (auto _ : state) benchmark::DoNotOptimize(assign_levels(points));
}
BENCHMARK(BM_AssignLevels)->Unit(benchmark::kMicrosecond);

void BM_ScoreGraph(benchmark::State& state) {
  const RankModel m = scaled_model(static_cast<Pooling>(state.range(0)));
  const OrderGraph g = apply_scaler(build_graph(bundled(), PlacementOrder::identity(6), 0), m.scaler);
  for (auto _ : state) benchmark::DoNotOptimize(score_graph(m, g));
}
BENCHMARK(BM_ScoreGraph)->Arg(0)->Arg(2);

void BM_RankAll(benchmark::State& state) {
  const RankModel m = scaled_model(Pooling::Mean);
  for (auto _ : state) benchmark::DoNotOptimize(rank_orders(bundled(), m, OrderSource::all()));
}
BENCHMARK(BM_RankAll)->Unit(benchmark::kMillisecond);

void BM_PairGradient(benchmark::State& state) {
  const RankModel m = scaled_model(Pooling::Mean);
  const OrderGraph a = apply_scaler(build_graph(bundled(), PlacementOrder::identity(6), 9), m.scaler);
  const OrderGraph b =
      apply_scaler(build_graph(bundled(), PlacementOrder({5, 4, 3, 2, 1, 0}), 2), m.scaler);
  std::vector<double> grad(parameter_count());
  for (auto _ : state) benchmark::DoNotOptimize(pair_gradient(m, a, b, grad));
}
BENCHMARK(BM_PairGradient);

void BM_TrainSteps(benchmark::State& state) {
  const RankModel m = scaled_model(Pooling::Mean);
  std::vector<OrderGraph> graphs;
  const auto orders = all_orders(6);
  for (std::size_t i = 0; i < 64; ++i) graphs.push_back(apply_scaler(build_graph(bundled(), orders[i * 11], static_cast<int>(i % 11)), m.scaler));
  std::vector<GraphPair> pairs;
  for (std::size_t i = 0; i + 1 < graphs.size(); ++i) pairs.push_back({i + 1, i});
  TrainConfig config;
  config.iterations = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train(graphs, pairs, m.scaler, config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainSteps)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include "chipletrank/ranking.hpp"

#include <algorithm>

#include "chipletrank/dataset.hpp"
#include "chipletrank/parallel.hpp"

namespace chipletrank {

std::vector<RankedOrder> rank_orders(const ChipletSystem& system, const RankModel& model,
                                     const OrderSource& candidates, std::size_t top,
                                     int parallelism) {
  const std::vector<PlacementOrder> orders = resolve_orders(system, candidates);
  std::vector<RankedOrder> ranked(orders.size());
  parallel_for(orders.size(), parallelism, [&](std::size_t i) {
    const OrderGraph graph = apply_scaler(build_graph(system, orders[i]), model.scaler);
    ranked[i] = RankedOrder{orders[i], score_graph(model, graph)};
  });
  std::sort(ranked.begin(), ranked.end(), [](const RankedOrder& a, const RankedOrder& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.order < b.order;
  });
  if (top > 0 && ranked.size() > top) ranked.resize(top);
  return ranked;
}

std::vector<double> score_scatter(const ChipletSystem& system, const RankModel& model,
                                  const LabeledScatter& labeled, int parallelism) {
  std::vector<double> scores(labeled.points.size());
  parallel_for(scores.size(), parallelism, [&](std::size_t i) {
    const OrderGraph graph = apply_scaler(
        build_graph(system, labeled.points[i].order, labeled.level[i]), model.scaler);
    scores[i] = score_graph(model, graph);
  });
  return scores;
}

double pairwise_accuracy(const LabeledScatter& labeled, const std::vector<double>& scores) {
  std::size_t total = 0;
  std::size_t correct = 0;
  const std::size_t n = labeled.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (labeled.level[i] == labeled.level[j]) continue;
      ++total;
      const bool i_higher = labeled.level[i] > labeled.level[j];
      if (i_higher ? scores[i] > scores[j] : scores[j] > scores[i]) ++correct;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace chipletrank

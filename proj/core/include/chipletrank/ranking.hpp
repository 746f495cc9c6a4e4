#pragma once

#include <cstddef>
#include <vector>

#include "chipletrank/model.hpp"
#include "chipletrank/pareto.hpp"
#include "chipletrank/placer.hpp"

namespace chipletrank {

struct RankedOrder {
  PlacementOrder order;
  double score = 0.0;
};

/// Scores each candidate order with the model, sorted by descending score,
/// ties broken lexicographically by order. Returns at most `top` entries
/// (all when top == 0).
std::vector<RankedOrder> rank_orders(const ChipletSystem& system, const RankModel& model,
                                     const OrderSource& candidates, std::size_t top = 0,
                                     int parallelism = 1);

/// Scores every point of a labeled scatter, in scatter order.
std::vector<double> score_scatter(const ChipletSystem& system, const RankModel& model,
                                  const LabeledScatter& labeled, int parallelism = 1);

/// Fraction of cross-level point pairs whose scores are strictly ordered like
/// their levels. Returns 0 when the scatter has no cross-level pair.
double pairwise_accuracy(const LabeledScatter& labeled, const std::vector<double>& scores);

}  // namespace chipletrank

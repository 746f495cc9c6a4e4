#include "chipletrank/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chipletrank/error.hpp"

namespace chipletrank {

Importance parse_importance(std::string_view text) {
  if (text == "pagerank") return Importance::PageRank;
  if (text == "degree") return Importance::Degree;
  fail(ErrorCode::InvalidConfig, "unknown importance '" + std::string(text) + "'");
}

std::vector<double> weighted_degree(const ChipletSystem& system) {
  std::vector<double> degree(system.size(), 0.0);
  for (const Net& net : system.nets) {
    degree[net.a] += net.wires;
    degree[net.b] += net.wires;
  }
  return degree;
}

std::vector<double> pagerank(const ChipletSystem& system, const PageRankConfig& config) {
  const std::size_t n = system.size();
  if (n == 0) return {};
  const std::vector<double> out_weight = weighted_degree(system);
  const double base = (1.0 - config.damping) / static_cast<double>(n);

  std::vector<double> rank(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (int it = 0; it < config.max_iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (out_weight[v] == 0.0) dangling += rank[v];
    }
    std::fill(next.begin(), next.end(),
              base + config.damping * dangling / static_cast<double>(n));
    for (const Net& net : system.nets) {
      next[net.b] += config.damping * rank[net.a] * net.wires / out_weight[net.a];
      next[net.a] += config.damping * rank[net.b] * net.wires / out_weight[net.b];
    }
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) change += std::abs(next[v] - rank[v]);
    rank.swap(next);
    if (change < config.tolerance) break;
  }
  return rank;
}

PlacementOrder baseline_order(const ChipletSystem& system, Importance importance) {
  const std::vector<double> weight =
      importance == Importance::PageRank ? pagerank(system) : weighted_degree(system);
  std::vector<double> key(system.size());
  for (std::size_t c = 0; c < system.size(); ++c) key[c] = weight[c] * system.chiplets[c].area();

  std::vector<int> seq(system.size());
  std::iota(seq.begin(), seq.end(), 0);
  std::stable_sort(seq.begin(), seq.end(), [&](int a, int b) { return key[a] > key[b]; });
  return PlacementOrder(std::move(seq));
}

}  // namespace chipletrank

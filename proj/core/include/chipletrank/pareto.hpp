#pragma once

#include <cstddef>
#include <vector>

#include "chipletrank/placer.hpp"

namespace chipletrank {

/// Bottom-left (P) and top-right (Q) corner sets of a scatter and the spread
/// between their means. Both objectives are minimized.
struct CornerSets {
  std::vector<std::size_t> minimal;  // P
  std::vector<std::size_t> maximal;  // Q
  double mean_t_minimal = 0.0;
  double mean_t_maximal = 0.0;
  double mean_wl_minimal = 0.0;
  double mean_wl_maximal = 0.0;
  double spread_t = 0.0;   // D_T
  double spread_wl = 0.0;  // D_WL
};

struct LabeledScatter {
  ScatterSet points;
  std::vector<double> slack;
  std::vector<int> level;
  /// Set when a corner spread was not positive and every slack was forced to 0.
  bool degenerate_spread = false;
};

inline constexpr int kMaxLevel = 10;
inline constexpr double kLevelWidth = 0.1;

/// Indices of non-dominated points when minimizing both objectives. Points
/// sharing coordinates are all kept.
std::vector<std::size_t> pareto_front(const ScatterSet& points);

/// Same as pareto_front, maximizing both objectives.
std::vector<std::size_t> pareto_front_max(const ScatterSet& points);

CornerSets corner_sets(const ScatterSet& points);

/// Least relaxation at which point i passes the relaxed non-domination test
/// "for all j: T_i <= T_j + d*D_T or WL_i <= WL_j + d*D_WL". Zero when no
/// point is strictly better in both objectives. Requires positive spreads.
double slack(const ScatterSet& points, const CornerSets& corners, std::size_t i);

/// Maps slack onto 0..10: [0,0.1) -> 10, [0.1,0.2) -> 9, ..., >= 1.0 -> 0.
int level_from_slack(double slack);

LabeledScatter assign_levels(const ScatterSet& points);

/// counts[L] for L in 0..10.
std::vector<std::size_t> level_histogram(const LabeledScatter& labeled);

}  // namespace chipletrank

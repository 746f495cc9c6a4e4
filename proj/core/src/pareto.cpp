#include "chipletrank/pareto.hpp"

#include <algorithm>

#include "chipletrank/error.hpp"

namespace chipletrank {

namespace {

void require_points(const ScatterSet& points) {
  if (points.empty()) fail(ErrorCode::EmptyScatter, "scatter has no points");
}

// True when a is at least as good as b in both objectives and strictly better
// in one, with `sign` = +1 for minimization and -1 for maximization.
bool dominates(const ScatterPoint& a, const ScatterPoint& b, double sign) {
  const double at = sign * a.temperature_c, bt = sign * b.temperature_c;
  const double aw = sign * a.wirelength_mm, bw = sign * b.wirelength_mm;
  return at <= bt && aw <= bw && (at < bt || aw < bw);
}

std::vector<std::size_t> front(const ScatterSet& points, double sign) {
  require_points(points);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      dominated = j != i && dominates(points[j], points[i], sign);
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

void means(const ScatterSet& points, const std::vector<std::size_t>& set, double& t,
           double& wl) {
  t = 0.0;
  wl = 0.0;
  for (std::size_t i : set) {
    t += points[i].temperature_c;
    wl += points[i].wirelength_mm;
  }
  t /= static_cast<double>(set.size());
  wl /= static_cast<double>(set.size());
}

bool has_distinct_points(const ScatterSet& points) {
  return std::any_of(points.begin(), points.end(), [&](const ScatterPoint& p) {
    return p.temperature_c != points.front().temperature_c ||
           p.wirelength_mm != points.front().wirelength_mm;
  });
}

}  // namespace

std::vector<std::size_t> pareto_front(const ScatterSet& points) { return front(points, 1.0); }

std::vector<std::size_t> pareto_front_max(const ScatterSet& points) {
  return front(points, -1.0);
}

CornerSets corner_sets(const ScatterSet& points) {
  CornerSets c;
  c.minimal = pareto_front(points);
  c.maximal = pareto_front_max(points);
  means(points, c.minimal, c.mean_t_minimal, c.mean_wl_minimal);
  means(points, c.maximal, c.mean_t_maximal, c.mean_wl_maximal);
  c.spread_t = c.mean_t_maximal - c.mean_t_minimal;
  c.spread_wl = c.mean_wl_maximal - c.mean_wl_minimal;
  return c;
}

double slack(const ScatterSet& points, const CornerSets& corners, std::size_t i) {
  if (!(corners.spread_t > 0.0) || !(corners.spread_wl > 0.0)) return 0.0;
  const ScatterPoint& p = points[i];
  double d = 0.0;
  for (const ScatterPoint& q : points) {
    if (q.temperature_c < p.temperature_c && q.wirelength_mm < p.wirelength_mm) {
      const double need = std::min((p.temperature_c - q.temperature_c) / corners.spread_t,
                                   (p.wirelength_mm - q.wirelength_mm) / corners.spread_wl);
      d = std::max(d, need);
    }
  }
  return d;
}

int level_from_slack(double s) {
  // Compare against k/10.0 rather than flooring s/0.1, which misplaces values
  // such as 0.3 (0.3/0.1 == 2.9999999999999996).
  int level = kMaxLevel;
  for (int k = 1; k <= kMaxLevel; ++k) {
    if (s >= k / 10.0) --level;
  }
  return level;
}

LabeledScatter assign_levels(const ScatterSet& points) {
  const CornerSets corners = corner_sets(points);
  LabeledScatter out;
  out.points = points;
  out.slack.resize(points.size(), 0.0);
  out.level.resize(points.size(), kMaxLevel);

  const bool positive = corners.spread_t > 0.0 && corners.spread_wl > 0.0;
  if (!positive) {
    out.degenerate_spread = has_distinct_points(points);
    return out;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.slack[i] = slack(points, corners, i);
    out.level[i] = level_from_slack(out.slack[i]);
  }
  return out;
}

std::vector<std::size_t> level_histogram(const LabeledScatter& labeled) {
  std::vector<std::size_t> counts(kMaxLevel + 1, 0);
  for (int l : labeled.level) ++counts.at(static_cast<std::size_t>(l));
  return counts;
}

}  // namespace chipletrank

#include "chipletrank/placer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "chipletrank/error.hpp"
#include "chipletrank/parallel.hpp"
#include "chipletrank/random.hpp"

namespace chipletrank {

void validate(const PlacerConfig& config) {
  if (config.grid < 1) fail(ErrorCode::InvalidConfig, "placer grid must be >= 1");
  if (config.spacing < 0) fail(ErrorCode::InvalidConfig, "placer spacing must be >= 0");
}

void validate(const ThermalConfig& config) {
  if (config.grid < 8) fail(ErrorCode::InvalidConfig, "thermal grid must be >= 8");
  if (!(config.kappa > 0.0)) fail(ErrorCode::InvalidConfig, "kappa must be > 0");
  if (!(config.sigma0 > 0.0)) fail(ErrorCode::InvalidConfig, "sigma0 must be > 0");
}

std::vector<CellRect> footprints(const ChipletSystem& system, const PlacerConfig& config) {
  validate(config);
  const double cell_w = system.interposer.width_mm / config.grid;
  const double cell_h = system.interposer.height_mm / config.grid;
  std::vector<CellRect> out;
  out.reserve(system.size());
  for (const Chiplet& c : system.chiplets) {
    // The small slack keeps exact multiples of the cell size from rounding up.
    const int cols = std::max(1, static_cast<int>(std::ceil(c.width_mm / cell_w - 1e-9)));
    const int rows = std::max(1, static_cast<int>(std::ceil(c.length_mm / cell_h - 1e-9)));
    out.push_back(CellRect{0, 0, cols, rows});
  }
  return out;
}

namespace {

bool near_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool separated(const CellRect& a, const CellRect& b, int spacing) {
  return a.col + a.cols + spacing <= b.col || b.col + b.cols + spacing <= a.col ||
         a.row + a.rows + spacing <= b.row || b.row + b.rows + spacing <= a.row;
}

struct Neighbor {
  int chiplet;
  double wires;
};

}  // namespace

Placement place_sequential(const ChipletSystem& system, const PlacementOrder& order,
                           const PlacerConfig& config) {
  validate_order(system, order);
  const std::vector<CellRect> sizes = footprints(system, config);
  const int grid = config.grid;
  const std::size_t n = system.size();

  Placement placement;
  placement.cell_width_mm = system.interposer.width_mm / grid;
  placement.cell_height_mm = system.interposer.height_mm / grid;
  placement.cells.assign(n, CellRect{});
  placement.centers.assign(n, Point{});
  const double cw = placement.cell_width_mm;
  const double ch = placement.cell_height_mm;

  std::vector<std::vector<Neighbor>> adjacency(n);
  for (const Net& net : system.nets) {
    adjacency[net.a].push_back({net.b, static_cast<double>(net.wires)});
    adjacency[net.b].push_back({net.a, static_cast<double>(net.wires)});
  }

  std::vector<bool> is_placed(n, false);
  std::vector<int> placed;
  placed.reserve(n);

  for (std::size_t step = 0; step < n; ++step) {
    const int c = order[step];
    const Chiplet& chip = system.chiplets[c];
    const CellRect size = sizes[c];
    if (size.cols > grid || size.rows > grid) {
      fail(ErrorCode::Unplaceable, "chiplet '" + chip.name + "' is larger than the interposer");
    }

    std::vector<Neighbor> placed_neighbors;
    for (const Neighbor& nb : adjacency[c]) {
      if (is_placed[nb.chiplet]) placed_neighbors.push_back(nb);
    }
    Point centroid;
    for (int p : placed) {
      centroid.x += placement.centers[p].x;
      centroid.y += placement.centers[p].y;
    }
    if (!placed.empty()) {
      centroid.x /= static_cast<double>(placed.size());
      centroid.y /= static_cast<double>(placed.size());
    }

    bool found = false;
    double best_cost = 0.0;
    double best_center_dist = 0.0;
    CellRect best{};

    for (int row = 0; row + size.rows <= grid; ++row) {
      for (int col = 0; col + size.cols <= grid; ++col) {
        const CellRect candidate{col, row, size.cols, size.rows};
        bool legal = true;
        for (int p : placed) {
          if (!separated(candidate, placement.cells[p], config.spacing)) {
            legal = false;
            break;
          }
        }
        if (!legal) continue;

        const double x = col * cw + chip.width_mm / 2.0;
        const double y = row * ch + chip.length_mm / 2.0;
        double cost = 0.0;
        if (!placed_neighbors.empty()) {
          for (const Neighbor& nb : placed_neighbors) {
            const Point& u = placement.centers[nb.chiplet];
            cost += nb.wires * (std::abs(x - u.x) + std::abs(y - u.y));
          }
        } else if (!placed.empty()) {
          cost = std::abs(x - centroid.x) + std::abs(y - centroid.y);
        }
        // Footprint center to grid center, in mm.
        const double center_dist = std::abs(2 * col + size.cols - grid) * cw / 2.0 +
                                   std::abs(2 * row + size.rows - grid) * ch / 2.0;

        bool better = !found;
        if (found) {
          if (near_equal(cost, best_cost)) {
            better = center_dist < best_center_dist && !near_equal(center_dist, best_center_dist);
          } else {
            better = cost < best_cost;
          }
        }
        if (better) {
          found = true;
          best_cost = cost;
          best_center_dist = center_dist;
          best = candidate;
        }
      }
    }

    if (!found) {
      fail(ErrorCode::Unplaceable, "no legal position for chiplet '" + chip.name +
                                       "' at step " + std::to_string(step + 1) + " of order " +
                                       order.to_string());
    }
    placement.cells[c] = best;
    placement.centers[c] = Point{best.col * cw + chip.width_mm / 2.0,
                                 best.row * ch + chip.length_mm / 2.0};
    is_placed[c] = true;
    placed.push_back(c);
  }
  return placement;
}

double total_wirelength(const ChipletSystem& system, const Placement& placement) {
  double total = 0.0;
  for (const Net& net : system.nets) {
    const Point& a = placement.centers[net.a];
    const Point& b = placement.centers[net.b];
    total += net.wires * (std::abs(a.x - b.x) + std::abs(a.y - b.y));
  }
  return total;
}

double peak_temperature(const ChipletSystem& system, const Placement& placement,
                        const ThermalConfig& config) {
  validate(config);
  struct Source {
    Point center;
    double power;
    double inv_two_sigma_sq;
  };
  std::vector<Source> sources;
  for (std::size_t c = 0; c < system.size(); ++c) {
    const Chiplet& chip = system.chiplets[c];
    if (chip.power_w <= 0.0) continue;
    const double sigma = std::max(chip.width_mm, chip.length_mm) / 2.0 + config.sigma0;
    sources.push_back({placement.centers[c], chip.power_w, 1.0 / (2.0 * sigma * sigma)});
  }
  if (sources.empty()) return system.interposer.ambient_c;

  const double dx = system.interposer.width_mm / config.grid;
  const double dy = system.interposer.height_mm / config.grid;
  double peak = 0.0;
  for (int j = 0; j < config.grid; ++j) {
    const double y = (j + 0.5) * dy;
    for (int i = 0; i < config.grid; ++i) {
      const double x = (i + 0.5) * dx;
      double field = 0.0;
      for (const Source& s : sources) {
        const double ddx = x - s.center.x;
        const double ddy = y - s.center.y;
        field += s.power * std::exp(-(ddx * ddx + ddy * ddy) * s.inv_two_sigma_sq);
      }
      peak = std::max(peak, field);
    }
  }
  return system.interposer.ambient_c + config.kappa * peak;
}

ScatterPoint evaluate_order(const ChipletSystem& system, const PlacementOrder& order,
                            const PlacerConfig& placer, const ThermalConfig& thermal) {
  const Placement placement = place_sequential(system, order, placer);
  return ScatterPoint{order, peak_temperature(system, placement, thermal),
                      total_wirelength(system, placement)};
}

LegalityReport check_legality(const Placement& placement, const PlacerConfig& config) {
  const int grid = config.grid;
  const int s = config.spacing;
  // Padded occupancy map so inflated footprints near the border still count.
  const int side = grid + 2 * s;
  std::vector<int> occupancy(static_cast<std::size_t>(side) * side, 0);
  LegalityReport report;
  for (const CellRect& r : placement.cells) {
    for (int row = r.row; row < r.row + r.rows; ++row) {
      for (int col = r.col; col < r.col + r.cols; ++col) {
        if (row < 0 || col < 0 || row >= grid || col >= grid) ++report.out_of_bounds_cells;
      }
    }
  }
  // Each footprint claims its cells inflated by spacing on the high side, so
  // two footprints conflict iff they share a claimed cell.
  for (const CellRect& r : placement.cells) {
    for (int row = r.row; row < r.row + r.rows + s; ++row) {
      for (int col = r.col; col < r.col + r.cols + s; ++col) {
        const int pr = row + s;
        const int pc = col + s;
        if (pr < 0 || pc < 0 || pr >= side || pc >= side) continue;
        int& cell = occupancy[static_cast<std::size_t>(pr) * side + pc];
        if (cell > 0) ++report.overlapping_cells;
        ++cell;
      }
    }
  }
  return report;
}

OrderSource OrderSource::all(std::size_t cap) {
  OrderSource s;
  s.kind = Kind::All;
  s.enumeration_cap = cap;
  return s;
}

OrderSource OrderSource::list(std::vector<PlacementOrder> orders) {
  OrderSource s;
  s.kind = Kind::Explicit;
  s.explicit_orders = std::move(orders);
  return s;
}

OrderSource OrderSource::sampled(std::size_t max_orders, std::uint64_t seed) {
  OrderSource s;
  s.kind = Kind::Sampled;
  s.max_orders = max_orders;
  s.seed = seed;
  return s;
}

namespace {

// n! saturated at `limit`.
std::size_t factorial_capped(std::size_t n, std::size_t limit) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    if (f > limit / i) return limit;
    f *= i;
  }
  return std::min(f, limit);
}

}  // namespace

std::vector<PlacementOrder> all_orders(std::size_t n, std::size_t cap) {
  if (n > cap) {
    fail(ErrorCode::TooManyOrders, "all-permutations requested for " + std::to_string(n) +
                                       " chiplets; the cap is " + std::to_string(cap));
  }
  std::vector<int> seq(n);
  std::iota(seq.begin(), seq.end(), 0);
  std::vector<PlacementOrder> out;
  out.reserve(factorial_capped(n, std::numeric_limits<std::size_t>::max()));
  do {
    out.emplace_back(seq);
  } while (std::next_permutation(seq.begin(), seq.end()));
  return out;
}

std::vector<PlacementOrder> sample_orders(std::size_t n, std::size_t max_orders,
                                          std::uint64_t seed) {
  const std::size_t total = factorial_capped(n, std::numeric_limits<std::size_t>::max());
  if (max_orders >= total) return all_orders(n, n);

  Rng rng(seed);
  std::set<std::vector<int>> chosen;
  std::vector<int> seq(n);
  std::iota(seq.begin(), seq.end(), 0);
  while (chosen.size() < max_orders) {
    rng.shuffle(seq);
    chosen.insert(seq);
  }
  std::vector<PlacementOrder> out;
  out.reserve(chosen.size());
  for (const auto& s : chosen) out.emplace_back(s);
  return out;
}

std::vector<PlacementOrder> resolve_orders(const ChipletSystem& system,
                                           const OrderSource& source) {
  std::vector<PlacementOrder> orders;
  switch (source.kind) {
    case OrderSource::Kind::All:
      orders = all_orders(system.size(), source.enumeration_cap);
      break;
    case OrderSource::Kind::Sampled:
      orders = sample_orders(system.size(), source.max_orders, source.seed);
      break;
    case OrderSource::Kind::Explicit:
      orders = source.explicit_orders;
      for (const PlacementOrder& o : orders) validate_order(system, o);
      std::sort(orders.begin(), orders.end());
      break;
  }
  return orders;
}

ScatterSet sweep(const ChipletSystem& system, const OrderSource& source,
                 const PlacerConfig& placer, const ThermalConfig& thermal, int parallelism) {
  validate(placer);
  validate(thermal);
  const std::vector<PlacementOrder> orders = resolve_orders(system, source);
  ScatterSet points(orders.size());
  parallel_for(orders.size(), parallelism, [&](std::size_t i) {
    points[i] = evaluate_order(system, orders[i], placer, thermal);
  });
  return points;
}

}  // namespace chipletrank

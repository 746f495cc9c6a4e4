#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "chipletrank/system.hpp"

namespace chipletrank {

struct PlacerConfig {
  int grid = 64;     // cells per interposer side
  int spacing = 0;   // minimum gap between footprints, in cells
};

struct ThermalConfig {
  int grid = 32;         // thermal samples per interposer side
  double kappa = 40.0;   // degC per watt
  double sigma0 = 1.0;   // kernel width offset, mm
};

void validate(const PlacerConfig& config);
void validate(const ThermalConfig& config);

/// Footprint of one chiplet on the placement grid, lower-left anchored.
struct CellRect {
  int col = 0;
  int row = 0;
  int cols = 0;
  int rows = 0;

  bool operator==(const CellRect&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Indexed by chiplet index, not by placement step.
struct Placement {
  std::vector<CellRect> cells;
  std::vector<Point> centers;  // mm
  double cell_width_mm = 0.0;
  double cell_height_mm = 0.0;
};

struct ScatterPoint {
  PlacementOrder order;
  double temperature_c = 0.0;
  double wirelength_mm = 0.0;

  bool operator==(const ScatterPoint&) const = default;
};

using ScatterSet = std::vector<ScatterPoint>;

/// Footprint size in cells (rounded up) for every chiplet.
std::vector<CellRect> footprints(const ChipletSystem& system, const PlacerConfig& config);

/// Greedy sequential placer. The first chiplet goes to the grid center; each
/// later chiplet takes the legal cell minimizing wire-weighted Manhattan
/// distance to its placed neighbors, or, with no placed neighbor, the
/// distance to the centroid of everything placed so far. Ties go to the cell
/// nearest the grid center, then to row-major scan order.
Placement place_sequential(const ChipletSystem& system, const PlacementOrder& order,
                           const PlacerConfig& config = {});

double total_wirelength(const ChipletSystem& system, const Placement& placement);

/// Gaussian-superposition thermal proxy sampled at thermal-cell centers.
double peak_temperature(const ChipletSystem& system, const Placement& placement,
                        const ThermalConfig& config = {});

ScatterPoint evaluate_order(const ChipletSystem& system, const PlacementOrder& order,
                            const PlacerConfig& placer = {},
                            const ThermalConfig& thermal = {});

struct LegalityReport {
  std::size_t overlapping_cells = 0;
  std::size_t out_of_bounds_cells = 0;

  bool legal() const noexcept { return overlapping_cells == 0 && out_of_bounds_cells == 0; }
};

/// Exhaustive cell-occupancy check; footprints are inflated by the spacing.
LegalityReport check_legality(const Placement& placement, const PlacerConfig& config);

inline constexpr std::size_t kDefaultEnumerationCap = 8;

/// Which orders a sweep (or a ranking pass) visits.
struct OrderSource {
  enum class Kind { All, Explicit, Sampled };

  Kind kind = Kind::All;
  std::vector<PlacementOrder> explicit_orders;
  std::size_t max_orders = 0;
  std::uint64_t seed = 0;
  std::size_t enumeration_cap = kDefaultEnumerationCap;

  static OrderSource all(std::size_t cap = kDefaultEnumerationCap);
  static OrderSource list(std::vector<PlacementOrder> orders);
  static OrderSource sampled(std::size_t max_orders, std::uint64_t seed);
};

/// Every permutation of 0..n-1 in lexicographic order. Throws TooManyOrders
/// when n exceeds `cap`.
std::vector<PlacementOrder> all_orders(std::size_t n, std::size_t cap = kDefaultEnumerationCap);

/// min(max_orders, n!) distinct permutations, sorted lexicographically.
std::vector<PlacementOrder> sample_orders(std::size_t n, std::size_t max_orders,
                                          std::uint64_t seed);

std::vector<PlacementOrder> resolve_orders(const ChipletSystem& system,
                                           const OrderSource& source);

/// One ScatterPoint per order, sorted by order so the result does not depend
/// on the worker schedule.
ScatterSet sweep(const ChipletSystem& system, const OrderSource& source,
                 const PlacerConfig& placer = {}, const ThermalConfig& thermal = {},
                 int parallelism = 1);

}  // namespace chipletrank

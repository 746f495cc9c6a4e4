#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chipletrank/pareto.hpp"
#include "chipletrank/system.hpp"

namespace chipletrank {

inline constexpr std::size_t kNodeFeatures = 7;

/// Node feature columns.
enum Feature : std::size_t {
  kWidth = 0,
  kLength,
  kPower,
  kStep,           // 1-based placement step
  kAreaRemaining,  // free interposer fraction after this step
  kPowerPlaced,    // cumulative placed power after this step, W
  kWiresClosed,    // wires of nets completed by placing this chiplet
};

using NodeFeatures = std::array<double, kNodeFeatures>;

struct GraphEdge {
  int a = 0;
  int b = 0;
  double wires = 0.0;
};

struct OrderGraph {
  std::string system_id;
  PlacementOrder order;
  int label = 0;
  std::vector<NodeFeatures> nodes;  // indexed by chiplet
  std::vector<GraphEdge> edges;

  std::size_t node_count() const noexcept { return nodes.size(); }
};

/// Order-dependent columns for one chiplet (node columns kStep..kWiresClosed).
struct DynamicFeatures {
  double step = 0.0;
  double area_remaining = 0.0;
  double power_placed = 0.0;
  double wires_closed = 0.0;
};

std::vector<DynamicFeatures> order_features(const ChipletSystem& system,
                                            const PlacementOrder& order);

OrderGraph build_graph(const ChipletSystem& system, const PlacementOrder& order,
                       int label = 0);

/// Per-feature min/max over a training corpus.
struct FeatureScaler {
  NodeFeatures node_min{};
  NodeFeatures node_max{};
  double edge_min = 0.0;
  double edge_max = 0.0;

  bool operator==(const FeatureScaler&) const = default;
};

FeatureScaler fit_scaler(std::span<const OrderGraph> graphs);

/// (x - min) / (max - min) clipped to [0, 1]; constant features map to 0.5.
double scale_value(double x, double lo, double hi) noexcept;

/// Normalizes node features. Edge weights keep their raw wire counts: the
/// aggregator divides by the neighborhood total, which is already scale-free.
OrderGraph apply_scaler(OrderGraph graph, const FeatureScaler& scaler);

struct SamplingConfig {
  int k = 10;
  std::uint64_t seed = 42;
};

struct LabeledCase {
  std::string system_id;
  const LabeledScatter* scatter = nullptr;
};

struct TrainingPair {
  std::string system_id;
  PlacementOrder strong;
  PlacementOrder weak;
  int level_strong = 0;
  int level_weak = 0;
  std::size_t strong_index = 0;  // position in the scatter
  std::size_t weak_index = 0;
};

/// For each point, up to k partners with a different level drawn uniformly
/// without replacement from the same system. Pairs are oriented
/// (higher level, lower level) and deduplicated across the whole pass.
std::vector<TrainingPair> sample_pairs(std::span<const LabeledCase> cases,
                                       const SamplingConfig& config);

// Pairs file: system_id,order_strong,order_weak,level_strong,level_weak
void write_pairs(std::ostream& out, std::span<const TrainingPair> pairs);
std::vector<TrainingPair> read_pairs(std::istream& in);
void save_pairs(const std::filesystem::path& path, std::span<const TrainingPair> pairs);
std::vector<TrainingPair> load_pairs(const std::filesystem::path& path);

}  // namespace chipletrank

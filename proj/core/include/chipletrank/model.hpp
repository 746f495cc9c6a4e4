#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chipletrank/dataset.hpp"

namespace chipletrank {

enum class Pooling { Mean, Sum, Max };

std::string_view to_string(Pooling pooling) noexcept;
Pooling parse_pooling(std::string_view text);

/// Dense row-major matrix, rows = nodes.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// Location of one layer inside the flat parameter vector. The weight block
/// is out x fan_in row-major, where fan_in = 2*in for GraphSage layers.
struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t fan_in = 0;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;
  bool graph = false;
};

// GraphSage 7 -> 7 -> 32 -> 64, then 64 -> 64 -> 32 -> 16 and a linear 16 -> 1.
inline constexpr std::array<std::size_t, 4> kSageWidths{kNodeFeatures, 7, 32, 64};
inline constexpr std::array<std::size_t, 5> kHeadWidths{64, 64, 32, 16, 1};
inline constexpr std::size_t kSageLayers = kSageWidths.size() - 1;
inline constexpr std::size_t kDenseLayers = kHeadWidths.size() - 1;
inline constexpr std::size_t kLayers = kSageLayers + kDenseLayers;

/// The sage layers come first, then the dense head.
const std::array<LayerShape, kLayers>& layer_shapes();
std::size_t parameter_count();

struct TrainingMeta {
  std::uint64_t seed = 0;
  int iterations = 0;
  std::vector<double> loss_history;
};

struct RankModel {
  Pooling pooling = Pooling::Mean;
  FeatureScaler scaler;
  std::vector<double> params = std::vector<double>(parameter_count(), 0.0);
  TrainingMeta meta;

  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> bias(std::size_t layer) const;
  std::span<double> weights(std::size_t layer);
  std::span<double> bias(std::size_t layer);
};

/// Xavier-uniform weights, zero biases.
RankModel init_model(Pooling pooling, std::uint64_t seed);

/// Per-node neighbor lists with wire-weighted mean coefficients.
struct Neighborhood {
  struct Link {
    int node = 0;
    double coeff = 0.0;
  };
  std::vector<std::vector<Link>> links;
};

Neighborhood make_neighborhood(std::size_t nodes, std::span<const GraphEdge> edges);

Matrix node_matrix(const OrderGraph& graph);

/// h'_v = ReLU(W [h_v ; agg_v] + b) with agg_v the wire-weighted neighbor
/// mean (zero for isolated nodes). `weight` is out x 2*in.
Matrix sage_forward(std::span<const double> weight, std::span<const double> bias,
                    std::size_t in, std::size_t out, const Matrix& states,
                    const Neighborhood& neighborhood);

std::vector<double> pool(const Matrix& states, Pooling mode);

/// Intermediate values of one forward pass, consumed by backward_score.
struct ForwardCache {
  Neighborhood neighborhood;
  std::array<Matrix, kSageLayers + 1> states;     // states[0] = input
  std::array<Matrix, kSageLayers> aggregates;
  std::array<Matrix, kSageLayers> pre;            // before ReLU
  std::vector<std::size_t> argmax;                // max pooling routes
  std::array<std::vector<double>, kDenseLayers + 1> acts;  // acts[0] = pooled
  std::array<std::vector<double>, kDenseLayers> dense_pre;
  double score = 0.0;
};

double forward(const RankModel& model, const OrderGraph& graph, ForwardCache& cache);

/// Graph must already be normalized with model.scaler.
double score_graph(const RankModel& model, const OrderGraph& graph);

/// Accumulates d_score * d(score)/d(params) into grad.
void backward_score(const RankModel& model, const ForwardCache& cache, double d_score,
                    std::span<double> grad);

/// -log sigmoid(s_strong - s_weak), computed as a stable softplus.
double pair_loss(double s_strong, double s_weak) noexcept;

/// d pair_loss / d (s_strong - s_weak) = -sigmoid(-(s_strong - s_weak)).
double pair_loss_slope(double s_strong, double s_weak) noexcept;

/// Accumulates the gradient of pair_loss through both forward passes
/// (shared weights) into grad and returns the loss.
double pair_gradient(const RankModel& model, const OrderGraph& strong,
                     const OrderGraph& weak, std::span<double> grad);

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;

  explicit AdamState(std::size_t size = 0) : m(size, 0.0), v(size, 0.0) {}
};

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config);

struct TrainConfig {
  AdamConfig adam;
  int batch = 64;
  int iterations = 3000;
  std::uint64_t seed = 42;
  Pooling pooling = Pooling::Mean;
  int threads = 1;
};

void validate(const TrainConfig& config);

struct GraphPair {
  std::size_t strong = 0;
  std::size_t weak = 0;
};

/// Minibatch RankNet training. `graphs` must be normalized with `scaler`;
/// pairs index into `graphs`. Deterministic for a fixed seed regardless of
/// the thread count.
RankModel train(std::span<const OrderGraph> graphs, std::span<const GraphPair> pairs,
                const FeatureScaler& scaler, const TrainConfig& config);

inline constexpr int kCheckpointVersion = 1;

std::string model_to_json(const RankModel& model);
RankModel model_from_json(std::string_view text);
void save_model(const RankModel& model, const std::filesystem::path& path);
RankModel load_model(const std::filesystem::path& path);

}  // namespace chipletrank

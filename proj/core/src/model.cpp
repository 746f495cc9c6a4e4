#include "chipletrank/model.hpp"

#include <algorithm>
#include <cmath>

#include "chipletrank/error.hpp"
#include "chipletrank/parallel.hpp"
#include "chipletrank/random.hpp"

namespace chipletrank {

std::string_view to_string(Pooling pooling) noexcept {
  switch (pooling) {
    case Pooling::Mean: return "mean";
    case Pooling::Sum: return "sum";
    case Pooling::Max: return "max";
  }
  return "mean";
}

Pooling parse_pooling(std::string_view text) {
  if (text == "mean") return Pooling::Mean;
  if (text == "sum") return Pooling::Sum;
  if (text == "max") return Pooling::Max;
  fail(ErrorCode::InvalidConfig, "unknown pooling '" + std::string(text) + "'");
}

namespace {

std::array<LayerShape, kLayers> make_shapes() {
  std::array<LayerShape, kLayers> shapes{};
  std::size_t offset = 0;
  for (std::size_t l = 0; l < kLayers; ++l) {
    LayerShape& s = shapes[l];
    s.graph = l < kSageLayers;
    if (s.graph) {
      s.in = kSageWidths[l];
      s.out = kSageWidths[l + 1];
      s.fan_in = 2 * s.in;
    } else {
      s.in = kHeadWidths[l - kSageLayers];
      s.out = kHeadWidths[l - kSageLayers + 1];
      s.fan_in = s.in;
    }
    s.weight_offset = offset;
    offset += s.out * s.fan_in;
    s.bias_offset = offset;
    offset += s.out;
  }
  return shapes;
}

// ReLU follows the first two dense layers only; the last two stay linear.
constexpr bool dense_relu(std::size_t d) { return d + 2 < kDenseLayers; }

}  // namespace

const std::array<LayerShape, kLayers>& layer_shapes() {
  static const std::array<LayerShape, kLayers> shapes = make_shapes();
  return shapes;
}

std::size_t parameter_count() {
  const LayerShape& last = layer_shapes().back();
  return last.bias_offset + last.out;
}

std::span<const double> RankModel::weights(std::size_t layer) const {
  const LayerShape& s = layer_shapes().at(layer);
  return {params.data() + s.weight_offset, s.out * s.fan_in};
}
std::span<const double> RankModel::bias(std::size_t layer) const {
  const LayerShape& s = layer_shapes().at(layer);
  return {params.data() + s.bias_offset, s.out};
}
std::span<double> RankModel::weights(std::size_t layer) {
  const LayerShape& s = layer_shapes().at(layer);
  return {params.data() + s.weight_offset, s.out * s.fan_in};
}
std::span<double> RankModel::bias(std::size_t layer) {
  const LayerShape& s = layer_shapes().at(layer);
  return {params.data() + s.bias_offset, s.out};
}

RankModel init_model(Pooling pooling, std::uint64_t seed) {
  RankModel model;
  model.pooling = pooling;
  model.meta.seed = seed;
  Rng rng(seed);
  for (std::size_t l = 0; l < kLayers; ++l) {
    const LayerShape& s = layer_shapes()[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(s.fan_in + s.out));
    for (double& w : model.weights(l)) w = rng.uniform(-bound, bound);
  }
  return model;
}

Neighborhood make_neighborhood(std::size_t nodes, std::span<const GraphEdge> edges) {
  Neighborhood nb;
  nb.links.resize(nodes);
  for (const GraphEdge& e : edges) {
    if (e.a < 0 || e.b < 0 || static_cast<std::size_t>(e.a) >= nodes ||
        static_cast<std::size_t>(e.b) >= nodes || e.a == e.b) {
      fail(ErrorCode::ShapeMismatch, "edge endpoint outside the graph");
    }
    if (!(e.wires > 0.0)) fail(ErrorCode::ShapeMismatch, "edge weight must be positive");
    nb.links[e.a].push_back({e.b, e.wires});
    nb.links[e.b].push_back({e.a, e.wires});
  }
  for (auto& list : nb.links) {
    double total = 0.0;
    for (const auto& link : list) total += link.coeff;
    for (auto& link : list) link.coeff /= total;
  }
  return nb;
}

Matrix node_matrix(const OrderGraph& graph) {
  Matrix m(graph.node_count(), kNodeFeatures);
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    std::copy(graph.nodes[v].begin(), graph.nodes[v].end(), m.row(v).begin());
  }
  return m;
}

namespace {

Matrix aggregate(const Matrix& states, const Neighborhood& nb) {
  Matrix agg(states.rows, states.cols);
  for (std::size_t v = 0; v < states.rows; ++v) {
    auto out = agg.row(v);
    for (const auto& link : nb.links[v]) {
      const auto src = states.row(link.node);
      for (std::size_t i = 0; i < states.cols; ++i) out[i] += link.coeff * src[i];
    }
  }
  return agg;
}

// pre(v, o) = b[o] + W[o, :in] . self[v] + W[o, in:] . agg[v]
Matrix sage_linear(std::span<const double> weight, std::span<const double> bias,
                   std::size_t in, std::size_t out, const Matrix& self, const Matrix& agg) {
  Matrix pre(self.rows, out);
  for (std::size_t v = 0; v < self.rows; ++v) {
    const auto hs = self.row(v);
    const auto ha = agg.row(v);
    for (std::size_t o = 0; o < out; ++o) {
      const double* w = weight.data() + o * 2 * in;
      double z = bias[o];
      for (std::size_t i = 0; i < in; ++i) z += w[i] * hs[i];
      for (std::size_t i = 0; i < in; ++i) z += w[in + i] * ha[i];
      pre(v, o) = z;
    }
  }
  return pre;
}

Matrix relu(const Matrix& m) {
  Matrix out = m;
  for (double& x : out.data) x = std::max(x, 0.0);
  return out;
}

std::vector<double> pool_with_routes(const Matrix& states, Pooling mode,
                                     std::vector<std::size_t>* argmax) {
  if (states.rows == 0) fail(ErrorCode::EmptyGraph, "cannot pool a graph with no nodes");
  std::vector<double> out(states.cols, 0.0);
  if (mode == Pooling::Max) {
    std::vector<std::size_t> route(states.cols, 0);
    for (std::size_t i = 0; i < states.cols; ++i) out[i] = states(0, i);
    for (std::size_t v = 1; v < states.rows; ++v) {
      for (std::size_t i = 0; i < states.cols; ++i) {
        if (states(v, i) > out[i]) {
          out[i] = states(v, i);
          route[i] = v;
        }
      }
    }
    if (argmax) *argmax = std::move(route);
    return out;
  }
  for (std::size_t v = 0; v < states.rows; ++v) {
    for (std::size_t i = 0; i < states.cols; ++i) out[i] += states(v, i);
  }
  if (mode == Pooling::Mean) {
    for (double& x : out) x /= static_cast<double>(states.rows);
  }
  return out;
}

}  // namespace

Matrix sage_forward(std::span<const double> weight, std::span<const double> bias,
                    std::size_t in, std::size_t out, const Matrix& states,
                    const Neighborhood& neighborhood) {
  if (states.cols != in || weight.size() != out * 2 * in || bias.size() != out ||
      neighborhood.links.size() != states.rows) {
    fail(ErrorCode::ShapeMismatch, "sage layer input does not match its shape");
  }
  return relu(sage_linear(weight, bias, in, out, states, aggregate(states, neighborhood)));
}

std::vector<double> pool(const Matrix& states, Pooling mode) {
  return pool_with_routes(states, mode, nullptr);
}

double forward(const RankModel& model, const OrderGraph& graph, ForwardCache& cache) {
  if (model.params.size() != parameter_count()) {
    fail(ErrorCode::ShapeMismatch, "model parameter vector has the wrong size");
  }
  if (graph.node_count() == 0) fail(ErrorCode::EmptyGraph, "graph has no nodes");
  const auto& shapes = layer_shapes();
  cache.neighborhood = make_neighborhood(graph.node_count(), graph.edges);
  cache.states[0] = node_matrix(graph);
  for (std::size_t l = 0; l < kSageLayers; ++l) {
    cache.aggregates[l] = aggregate(cache.states[l], cache.neighborhood);
    cache.pre[l] = sage_linear(model.weights(l), model.bias(l), shapes[l].in, shapes[l].out,
                               cache.states[l], cache.aggregates[l]);
    cache.states[l + 1] = relu(cache.pre[l]);
  }
  cache.argmax.clear();
  cache.acts[0] = pool_with_routes(cache.states[kSageLayers], model.pooling, &cache.argmax);
  for (std::size_t d = 0; d < kDenseLayers; ++d) {
    const std::size_t l = kSageLayers + d;
    const LayerShape& s = shapes[l];
    const auto w = model.weights(l);
    const auto b = model.bias(l);
    const std::vector<double>& x = cache.acts[d];
    std::vector<double>& z = cache.dense_pre[d];
    z.assign(s.out, 0.0);
    for (std::size_t o = 0; o < s.out; ++o) {
      const double* row = w.data() + o * s.in;
      double acc = b[o];
      for (std::size_t i = 0; i < s.in; ++i) acc += row[i] * x[i];
      z[o] = acc;
    }
    cache.acts[d + 1] = z;
    if (dense_relu(d)) {
      for (double& a : cache.acts[d + 1]) a = std::max(a, 0.0);
    }
  }
  cache.score = cache.acts[kDenseLayers][0];
  return cache.score;
}

double score_graph(const RankModel& model, const OrderGraph& graph) {
  ForwardCache cache;
  return forward(model, graph, cache);
}

void backward_score(const RankModel& model, const ForwardCache& cache, double d_score,
                    std::span<double> grad) {
  if (grad.size() != model.params.size()) {
    fail(ErrorCode::ShapeMismatch, "gradient buffer has the wrong size");
  }
  const auto& shapes = layer_shapes();

  std::vector<double> upstream{d_score};
  for (std::size_t d = kDenseLayers; d-- > 0;) {
    const std::size_t l = kSageLayers + d;
    const LayerShape& s = shapes[l];
    const auto w = model.weights(l);
    const std::vector<double>& x = cache.acts[d];
    std::vector<double> dz = upstream;
    if (dense_relu(d)) {
      for (std::size_t o = 0; o < s.out; ++o) {
        if (!(cache.dense_pre[d][o] > 0.0)) dz[o] = 0.0;
      }
    }
    double* gw = grad.data() + s.weight_offset;
    double* gb = grad.data() + s.bias_offset;
    std::vector<double> dx(s.in, 0.0);
    for (std::size_t o = 0; o < s.out; ++o) {
      if (dz[o] == 0.0) continue;
      gb[o] += dz[o];
      const double* row = w.data() + o * s.in;
      double* grow = gw + o * s.in;
      for (std::size_t i = 0; i < s.in; ++i) {
        grow[i] += dz[o] * x[i];
        dx[i] += row[i] * dz[o];
      }
    }
    upstream = std::move(dx);
  }

  // Pooling.
  const Matrix& top = cache.states[kSageLayers];
  Matrix d_states(top.rows, top.cols);
  switch (model.pooling) {
    case Pooling::Mean:
    case Pooling::Sum: {
      const double scale =
          model.pooling == Pooling::Mean ? 1.0 / static_cast<double>(top.rows) : 1.0;
      for (std::size_t v = 0; v < top.rows; ++v) {
        for (std::size_t i = 0; i < top.cols; ++i) d_states(v, i) = upstream[i] * scale;
      }
      break;
    }
    case Pooling::Max:
      for (std::size_t i = 0; i < top.cols; ++i) d_states(cache.argmax[i], i) = upstream[i];
      break;
  }

  for (std::size_t l = kSageLayers; l-- > 0;) {
    const LayerShape& s = shapes[l];
    const auto w = model.weights(l);
    const Matrix& self = cache.states[l];
    const Matrix& agg = cache.aggregates[l];
    const Matrix& pre = cache.pre[l];
    double* gw = grad.data() + s.weight_offset;
    double* gb = grad.data() + s.bias_offset;
    const bool need_input_grad = l > 0;
    Matrix d_self(self.rows, s.in);
    Matrix d_agg(self.rows, s.in);

    for (std::size_t v = 0; v < self.rows; ++v) {
      const auto hs = self.row(v);
      const auto ha = agg.row(v);
      auto ds = d_self.row(v);
      auto da = d_agg.row(v);
      for (std::size_t o = 0; o < s.out; ++o) {
        if (!(pre(v, o) > 0.0)) continue;
        const double dz = d_states(v, o);
        if (dz == 0.0) continue;
        gb[o] += dz;
        double* grow = gw + o * s.fan_in;
        const double* row = w.data() + o * s.fan_in;
        for (std::size_t i = 0; i < s.in; ++i) {
          grow[i] += dz * hs[i];
          grow[s.in + i] += dz * ha[i];
        }
        if (need_input_grad) {
          for (std::size_t i = 0; i < s.in; ++i) {
            ds[i] += row[i] * dz;
            da[i] += row[s.in + i] * dz;
          }
        }
      }
    }
    if (!need_input_grad) break;

    // agg_v = sum_u c_uv h_u, so d h_u += c_uv d agg_v.
    Matrix d_prev = d_self;
    for (std::size_t v = 0; v < self.rows; ++v) {
      const auto da = d_agg.row(v);
      for (const auto& link : cache.neighborhood.links[v]) {
        auto dst = d_prev.row(link.node);
        for (std::size_t i = 0; i < s.in; ++i) dst[i] += link.coeff * da[i];
      }
    }
    d_states = std::move(d_prev);
  }
}

double pair_loss(double s_strong, double s_weak) noexcept {
  const double delta = s_strong - s_weak;
  // softplus(-delta) = max(-delta, 0) + log1p(exp(-|delta|))
  return std::max(-delta, 0.0) + std::log1p(std::exp(-std::abs(delta)));
}

double pair_loss_slope(double s_strong, double s_weak) noexcept {
  const double delta = s_strong - s_weak;
  if (delta >= 0.0) {
    const double e = std::exp(-delta);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(delta));
}

double pair_gradient(const RankModel& model, const OrderGraph& strong, const OrderGraph& weak,
                     std::span<double> grad) {
  ForwardCache cs;
  ForwardCache cw;
  const double ss = forward(model, strong, cs);
  const double sw = forward(model, weak, cw);
  const double slope = pair_loss_slope(ss, sw);
  backward_score(model, cs, slope, grad);
  backward_score(model, cw, -slope, grad);
  return pair_loss(ss, sw);
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    fail(ErrorCode::ShapeMismatch, "adam buffers do not match the parameter count");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
  }
}

void validate(const TrainConfig& config) {
  if (!(config.adam.lr > 0.0)) fail(ErrorCode::InvalidConfig, "learning rate must be > 0");
  if (config.batch < 1) fail(ErrorCode::InvalidConfig, "batch must be >= 1");
  if (config.iterations < 1) fail(ErrorCode::InvalidConfig, "iterations must be >= 1");
  if (!(config.adam.beta1 >= 0.0 && config.adam.beta1 < 1.0) ||
      !(config.adam.beta2 >= 0.0 && config.adam.beta2 < 1.0) || !(config.adam.eps > 0.0)) {
    fail(ErrorCode::InvalidConfig, "adam betas must lie in [0, 1) and eps must be > 0");
  }
}

RankModel train(std::span<const OrderGraph> graphs, std::span<const GraphPair> pairs,
                const FeatureScaler& scaler, const TrainConfig& config) {
  validate(config);
  if (pairs.empty()) fail(ErrorCode::EmptyDataset, "no training pairs");
  for (const GraphPair& p : pairs) {
    if (p.strong >= graphs.size() || p.weak >= graphs.size()) {
      fail(ErrorCode::EmptyDataset, "training pair references a missing graph");
    }
  }

  RankModel model = init_model(config.pooling, config.seed);
  model.scaler = scaler;
  model.meta.iterations = config.iterations;
  model.meta.loss_history.reserve(static_cast<std::size_t>(config.iterations));

  const std::size_t n_params = model.params.size();
  const std::size_t batch = static_cast<std::size_t>(config.batch);
  // Gradients are reduced over fixed-size chunks in a fixed order, so the
  // result does not depend on how many threads process the chunks.
  constexpr std::size_t kChunk = 8;
  const std::size_t chunks = (batch + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> chunk_grads(chunks, std::vector<double>(n_params));
  std::vector<double> chunk_loss(chunks);
  std::vector<double> grad(n_params);
  std::vector<std::size_t> picks(batch);
  std::vector<std::size_t> deck(pairs.size());
  for (std::size_t i = 0; i < deck.size(); ++i) deck[i] = i;

  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  AdamState adam(n_params);

  for (int it = 0; it < config.iterations; ++it) {
    if (pairs.size() >= batch) {
      for (std::size_t b = 0; b < batch; ++b) {
        std::swap(deck[b], deck[b + rng.below(deck.size() - b)]);
        picks[b] = deck[b];
      }
    } else {
      for (std::size_t b = 0; b < batch; ++b) picks[b] = rng.below(pairs.size());
    }

    parallel_for(chunks, config.threads, [&](std::size_t c) {
      std::vector<double>& g = chunk_grads[c];
      std::fill(g.begin(), g.end(), 0.0);
      double loss = 0.0;
      const std::size_t end = std::min(batch, (c + 1) * kChunk);
      for (std::size_t b = c * kChunk; b < end; ++b) {
        const GraphPair& p = pairs[picks[b]];
        loss += pair_gradient(model, graphs[p.strong], graphs[p.weak], g);
      }
      chunk_loss[c] = loss;
    });

    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
      loss += chunk_loss[c];
      for (std::size_t i = 0; i < n_params; ++i) grad[i] += chunk_grads[c][i];
    }
    const double inv = 1.0 / static_cast<double>(batch);
    for (double& g : grad) g *= inv;
    model.meta.loss_history.push_back(loss * inv);
    adam_step(model.params, grad, adam, config.adam);
  }
  return model;
}

}  // namespace chipletrank

#include "chipletrank/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <tuple>

#include "chipletrank/error.hpp"
#include "chipletrank/random.hpp"

namespace chipletrank {

std::vector<DynamicFeatures> order_features(const ChipletSystem& system,
                                            const PlacementOrder& order) {
  validate_order(system, order);
  const std::size_t n = system.size();
  std::vector<std::size_t> step_of(n);
  for (std::size_t t = 0; t < n; ++t) step_of[order[t]] = t;

  std::vector<double> closed(n, 0.0);
  for (const Net& net : system.nets) {
    // A net closes when its later endpoint is placed.
    const int later = step_of[net.a] > step_of[net.b] ? net.a : net.b;
    closed[later] += net.wires;
  }

  const double interposer_area = system.interposer.area();
  std::vector<DynamicFeatures> out(n);
  double area = 0.0;
  double power = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const int c = order[t];
    area += system.chiplets[c].area();
    power += system.chiplets[c].power_w;
    out[c] = DynamicFeatures{static_cast<double>(t + 1), 1.0 - area / interposer_area, power,
                             closed[c]};
  }
  return out;
}

OrderGraph build_graph(const ChipletSystem& system, const PlacementOrder& order, int label) {
  if (label < 0 || label > kMaxLevel) {
    fail(ErrorCode::InvalidConfig, "graph label " + std::to_string(label) + " outside 0..10");
  }
  const std::vector<DynamicFeatures> dyn = order_features(system, order);

  OrderGraph g;
  g.system_id = system.name;
  g.order = order;
  g.label = label;
  g.nodes.resize(system.size());
  for (std::size_t c = 0; c < system.size(); ++c) {
    const Chiplet& chip = system.chiplets[c];
    g.nodes[c] = NodeFeatures{chip.width_mm,       chip.length_mm,         chip.power_w,
                              dyn[c].step,         dyn[c].area_remaining,  dyn[c].power_placed,
                              dyn[c].wires_closed};
  }
  g.edges.reserve(system.nets.size());
  for (const Net& net : system.nets) {
    g.edges.push_back(GraphEdge{net.a, net.b, static_cast<double>(net.wires)});
  }
  return g;
}

FeatureScaler fit_scaler(std::span<const OrderGraph> graphs) {
  if (graphs.empty()) fail(ErrorCode::EmptyCorpus, "cannot fit a scaler on zero graphs");
  FeatureScaler s;
  s.node_min.fill(std::numeric_limits<double>::infinity());
  s.node_max.fill(-std::numeric_limits<double>::infinity());
  s.edge_min = std::numeric_limits<double>::infinity();
  s.edge_max = -std::numeric_limits<double>::infinity();
  bool any_node = false;
  for (const OrderGraph& g : graphs) {
    for (const NodeFeatures& x : g.nodes) {
      any_node = true;
      for (std::size_t f = 0; f < kNodeFeatures; ++f) {
        s.node_min[f] = std::min(s.node_min[f], x[f]);
        s.node_max[f] = std::max(s.node_max[f], x[f]);
      }
    }
    for (const GraphEdge& e : g.edges) {
      s.edge_min = std::min(s.edge_min, e.wires);
      s.edge_max = std::max(s.edge_max, e.wires);
    }
  }
  if (!any_node) fail(ErrorCode::EmptyCorpus, "corpus graphs have no nodes");
  if (s.edge_min > s.edge_max) s.edge_min = s.edge_max = 0.0;
  return s;
}

double scale_value(double x, double lo, double hi) noexcept {
  if (!(hi > lo)) return 0.5;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

OrderGraph apply_scaler(OrderGraph graph, const FeatureScaler& scaler) {
  for (NodeFeatures& x : graph.nodes) {
    for (std::size_t f = 0; f < kNodeFeatures; ++f) {
      x[f] = scale_value(x[f], scaler.node_min[f], scaler.node_max[f]);
    }
  }
  return graph;
}

std::vector<TrainingPair> sample_pairs(std::span<const LabeledCase> cases,
                                       const SamplingConfig& config) {
  if (config.k < 1) fail(ErrorCode::InvalidConfig, "pair sampling k must be >= 1");
  Rng rng(config.seed);
  std::vector<TrainingPair> pairs;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;

  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const LabeledScatter& s = *cases[ci].scatter;
    const std::size_t n = s.points.size();
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n; ++i) {
      candidates.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (s.level[j] != s.level[i]) candidates.push_back(j);
      }
      const std::size_t draws = std::min<std::size_t>(config.k, candidates.size());
      for (std::size_t d = 0; d < draws; ++d) {
        // Partial Fisher-Yates: slot d receives a uniform pick from the rest.
        const std::size_t pick = d + rng.below(candidates.size() - d);
        std::swap(candidates[d], candidates[pick]);
        const std::size_t j = candidates[d];
        if (!seen.emplace(ci, std::min(i, j), std::max(i, j)).second) continue;
        const bool i_strong = s.level[i] > s.level[j];
        const std::size_t strong = i_strong ? i : j;
        const std::size_t weak = i_strong ? j : i;
        pairs.push_back(TrainingPair{cases[ci].system_id, s.points[strong].order,
                                     s.points[weak].order, s.level[strong], s.level[weak],
                                     strong, weak});
      }
    }
  }
  if (pairs.empty()) {
    fail(ErrorCode::NoComparablePairs, "every labeled point shares the same level");
  }
  return pairs;
}

namespace {

constexpr std::string_view kPairsHeader =
    "system_id,order_strong,order_weak,level_strong,level_weak";

int parse_level(std::string_view field, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 0 ||
      value > kMaxLevel) {
    fail(ErrorCode::MalformedFile, "pairs line " + std::to_string(line_no) + ": bad level");
  }
  return value;
}

}  // namespace

void write_pairs(std::ostream& out, std::span<const TrainingPair> pairs) {
  out << kPairsHeader << '\n';
  for (const TrainingPair& p : pairs) {
    out << p.system_id << ',' << p.strong.to_string() << ',' << p.weak.to_string() << ','
        << p.level_strong << ',' << p.level_weak << '\n';
  }
}

std::vector<TrainingPair> read_pairs(std::istream& in) {
  std::vector<TrainingPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kPairsHeader) fail(ErrorCode::MalformedFile, "pairs file: bad header");
      header = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (int i = 0; i < 4; ++i) {
      const std::size_t pos = rest.rfind(',');
      if (pos == std::string_view::npos) {
        fail(ErrorCode::MalformedFile, "pairs line " + std::to_string(line_no) + ": too few fields");
      }
      fields.insert(fields.begin(), rest.substr(pos + 1));
      rest = rest.substr(0, pos);
    }
    if (rest.find(',') != std::string_view::npos) {
      fail(ErrorCode::MalformedFile, "pairs line " + std::to_string(line_no) + ": too many fields");
    }
    TrainingPair p;
    p.system_id = std::string(rest);
    try {
      p.strong = PlacementOrder::parse(fields[0]);
      p.weak = PlacementOrder::parse(fields[1]);
    } catch (const Error& e) {
      fail(ErrorCode::MalformedFile, "pairs line " + std::to_string(line_no) + ": " + e.what());
    }
    p.level_strong = parse_level(fields[2], line_no);
    p.level_weak = parse_level(fields[3], line_no);
    if (p.level_strong <= p.level_weak) {
      fail(ErrorCode::MalformedFile,
           "pairs line " + std::to_string(line_no) + ": strong level must exceed weak level");
    }
    pairs.push_back(std::move(p));
  }
  if (!header) fail(ErrorCode::MalformedFile, "pairs file: missing header");
  return pairs;
}

void save_pairs(const std::filesystem::path& path, std::span<const TrainingPair> pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  write_pairs(out, pairs);
}

std::vector<TrainingPair> load_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  return read_pairs(in);
}

}  // namespace chipletrank

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chipletrank/dataset.hpp"
#include "chipletrank/error.hpp"
#include "chipletrank/manifest.hpp"
#include "chipletrank/model.hpp"
#include "chipletrank/ordering.hpp"
#include "chipletrank/placer.hpp"
#include "chipletrank/plot.hpp"
#include "chipletrank/ranking.hpp"
#include "chipletrank/report.hpp"
#include "chipletrank/scatter_io.hpp"
#include "chipletrank/system.hpp"

namespace chipletrank::cli {

namespace {

struct Globals {
  std::uint64_t seed = 42;
  std::string out;
  int parallel = 1;
};

struct SweepArgs {
  std::string system;
  std::string orders = "all";
  std::size_t max_orders = 1000;
  std::string order_file;
  std::size_t cap = kDefaultEnumerationCap;
  PlacerConfig placer;
  ThermalConfig thermal;
};

struct LabelArgs {
  std::string in;
};

struct PairsArgs {
  std::vector<std::string> systems;
  std::vector<std::string> labeled;
  int k = 10;
};

struct TrainArgs {
  std::vector<std::string> systems;
  std::string pairs;
  std::string pooling = "mean";
  int iterations = 3000;
  int batch = 64;
  double lr = 1e-4;
};

struct RankArgs {
  std::string system;
  std::string model;
  std::string candidates = "all";
  std::size_t max_orders = 1000;
  std::size_t top = 5;
};

struct BaselineArgs {
  std::string system;
  std::string importance = "pagerank";
};

struct EvalArgs {
  std::vector<std::string> train_systems;
  std::vector<std::string> train_labeled;
  std::vector<std::string> test_systems;
  std::vector<std::string> test_labeled;
  std::string model;
  std::size_t top = 5;
  std::string importance = "pagerank";
};

struct PlotArgs {
  std::string labeled;
  std::vector<std::string> highlights;
  std::string ranked;
  std::string title;
};

class Run {
 public:
  Run(std::string command, const std::vector<std::string>& args, const Globals& globals)
      : globals_(globals) {
    manifest_.command = std::move(command);
    manifest_.arguments = args;
    std::string joined;
    for (const auto& a : args) joined += a + '\x1f';
    manifest_.config_hash = "fnv1a64:" + fnv1a64_hex(joined);
    manifest_.tool_version = tool_version();
    manifest_.started_at = utc_timestamp();
  }

  void input(const std::string& path) { manifest_.input_digests[path] = file_digest(path); }
  void seed(const std::string& name, std::uint64_t value) { manifest_.seeds[name] = value; }
  void output(const std::string& path) { manifest_.outputs.push_back(path); }

  /// Writes `body` to --out (plus manifest) or to stdout when --out is unset.
  void emit(const std::string& body, std::ostream& out) {
    if (globals_.out.empty()) {
      out << body;
      return;
    }
    std::ofstream file(globals_.out, std::ios::binary);
    if (!file) fail(ErrorCode::IoError, "cannot write " + globals_.out);
    file << body;
    if (!file) fail(ErrorCode::IoError, "write failed: " + globals_.out);
    output(globals_.out);
    finish();
  }

  void finish() {
    if (globals_.out.empty()) return;
    manifest_.finished_at = utc_timestamp();
    write_manifest(globals_.out, manifest_);
  }

 private:
  Globals globals_;
  RunManifest manifest_;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<PlacementOrder> read_order_file(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<PlacementOrder> orders;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    orders.push_back(PlacementOrder::parse(line));
  }
  return orders;
}

void require_same_length(const std::vector<std::string>& a, const std::vector<std::string>& b,
                         const std::string& what) {
  if (a.size() != b.size()) {
    fail(ErrorCode::UsageError, what + ": every --system needs a matching --labeled");
  }
}

int do_sweep(const SweepArgs& a, const Globals& g, Run& run, std::ostream& out) {
  const ChipletSystem system = parse_system(a.system);
  run.input(a.system);
  OrderSource source;
  if (a.orders == "all") {
    source = OrderSource::all(a.cap);
  } else if (a.orders == "sampled") {
    source = OrderSource::sampled(a.max_orders, g.seed);
    run.seed("orders", g.seed);
  } else if (a.orders == "list") {
    if (a.order_file.empty()) fail(ErrorCode::UsageError, "--orders list requires --order-file");
    source = OrderSource::list(read_order_file(a.order_file));
    run.input(a.order_file);
  } else {
    fail(ErrorCode::UsageError, "--orders must be all, sampled or list");
  }
  const ScatterSet points = sweep(system, source, a.placer, a.thermal, g.parallel);
  std::ostringstream body;
  write_sweep_csv(body, points);
  run.emit(body.str(), out);
  return kSuccess;
}

int do_label(const LabelArgs& a, Run& run, std::ostream& out, std::ostream& err) {
  const ScatterSet points = load_sweep_csv(a.in);
  run.input(a.in);
  const LabeledScatter labeled = assign_levels(points);
  if (labeled.degenerate_spread) {
    err << "warning: DegenerateSpread: corner sets of " << a.in
        << " have a non-positive temperature or wirelength spread; every slack set to 0\n";
  }
  std::ostringstream body;
  write_labeled_csv(body, labeled);
  run.emit(body.str(), out);
  return kSuccess;
}

int do_pairs(const PairsArgs& a, const Globals& g, Run& run, std::ostream& out) {
  require_same_length(a.systems, a.labeled, "pairs");
  std::vector<ChipletSystem> systems;
  std::vector<LabeledScatter> scatters;
  for (std::size_t i = 0; i < a.systems.size(); ++i) {
    systems.push_back(parse_system(a.systems[i]));
    scatters.push_back(load_labeled_csv(a.labeled[i]));
    run.input(a.systems[i]);
    run.input(a.labeled[i]);
    for (const ScatterPoint& p : scatters.back().points) validate_order(systems.back(), p.order);
  }
  std::vector<LabeledCase> cases;
  for (std::size_t i = 0; i < systems.size(); ++i) cases.push_back({systems[i].name, &scatters[i]});
  const auto pairs = sample_pairs(cases, SamplingConfig{a.k, g.seed});
  run.seed("pairs", g.seed);
  std::ostringstream body;
  write_pairs(body, pairs);
  run.emit(body.str(), out);
  return kSuccess;
}

std::map<std::string, ChipletSystem> load_systems(const std::vector<std::string>& paths, Run& run) {
  std::map<std::string, ChipletSystem> systems;
  for (const std::string& path : paths) {
    ChipletSystem s = parse_system(path);
    run.input(path);
    const std::string name = s.name;
    if (!systems.emplace(name, std::move(s)).second) {
      fail(ErrorCode::UsageError, "system name '" + name + "' given twice");
    }
  }
  return systems;
}

int do_train(const TrainArgs& a, const Globals& g, Run& run, std::ostream& out, std::ostream& err) {
  TrainConfig config;
  config.adam.lr = a.lr;
  config.batch = a.batch;
  config.iterations = a.iterations;
  config.seed = g.seed;
  config.pooling = parse_pooling(a.pooling);
  config.threads = g.parallel;
  validate(config);

  const auto systems = load_systems(a.systems, run);
  const auto pairs = load_pairs(a.pairs);
  run.input(a.pairs);

  // One graph per distinct (system, order) referenced by the pairs.
  std::vector<OrderGraph> graphs;
  std::map<std::pair<std::string, PlacementOrder>, std::size_t> index;
  auto graph_for = [&](const std::string& id, const PlacementOrder& order, int level) {
    const auto key = std::make_pair(id, order);
    if (const auto it = index.find(key); it != index.end()) return it->second;
    const auto sys = systems.find(id);
    if (sys == systems.end()) {
      fail(ErrorCode::MalformedFile, "pairs reference unknown system '" + id + "'");
    }
    graphs.push_back(build_graph(sys->second, order, level));
    index.emplace(key, graphs.size() - 1);
    return graphs.size() - 1;
  };
  std::vector<GraphPair> graph_pairs;
  graph_pairs.reserve(pairs.size());
  for (const TrainingPair& p : pairs) {
    const std::size_t s = graph_for(p.system_id, p.strong, p.level_strong);
    const std::size_t w = graph_for(p.system_id, p.weak, p.level_weak);
    graph_pairs.push_back({s, w});
  }

  const FeatureScaler scaler = fit_scaler(graphs);
  for (OrderGraph& graph : graphs) graph = apply_scaler(std::move(graph), scaler);

  run.seed("train", g.seed);

  const RankModel model = train(graphs, graph_pairs, scaler, config);
  err << "trained on " << graph_pairs.size() << " pairs over " << graphs.size()
      << " graphs; final batch loss " << model.meta.loss_history.back() << '\n';
  run.emit(model_to_json(model), out);
  return kSuccess;
}

int do_rank(const RankArgs& a, const Globals& g, Run& run, std::ostream& out) {
  const ChipletSystem system = parse_system(a.system);
  const RankModel model = load_model(a.model);
  run.input(a.system);
  run.input(a.model);
  OrderSource source;
  if (a.candidates == "all") {
    source = OrderSource::all();
  } else if (a.candidates == "sampled") {
    source = OrderSource::sampled(a.max_orders, g.seed);
    run.seed("candidates", g.seed);
  } else {
    fail(ErrorCode::UsageError, "--candidates must be all or sampled");
  }
  const auto ranked = rank_orders(system, model, source, a.top, g.parallel);
  std::ostringstream body;
  body << "rank,order,score\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    char score[40];
    std::snprintf(score, sizeof score, "%.17g", ranked[i].score);
    body << i + 1 << ',' << ranked[i].order.to_string() << ',' << score << '\n';
  }
  run.emit(body.str(), out);
  return kSuccess;
}

int do_baseline(const BaselineArgs& a, Run& run, std::ostream& out) {
  const ChipletSystem system = parse_system(a.system);
  run.input(a.system);
  const Importance importance = parse_importance(a.importance);
  const PlacementOrder order = baseline_order(system, importance);
  const std::vector<double> weight =
      importance == Importance::PageRank ? pagerank(system) : weighted_degree(system);
  std::ostringstream body;
  body << "# order " << order.to_string() << '\n';
  body << "step,chiplet,name,importance,area_mm2,key\n";
  for (std::size_t t = 0; t < order.size(); ++t) {
    const int c = order[t];
    body << t + 1 << ',' << c << ',' << system.chiplets[c].name << ',' << format_g6(weight[c])
         << ',' << format_g6(system.chiplets[c].area()) << ','
         << format_g6(weight[c] * system.chiplets[c].area()) << '\n';
  }
  run.emit(body.str(), out);
  return kSuccess;
}

int do_eval(const EvalArgs& a, const Globals& g, Run& run, std::ostream& out) {
  require_same_length(a.train_systems, a.train_labeled, "eval (train)");
  require_same_length(a.test_systems, a.test_labeled, "eval (test)");
  const RankModel model = load_model(a.model);
  run.input(a.model);

  std::vector<ChipletSystem> systems;
  std::vector<LabeledScatter> scatters;
  std::vector<bool> training;
  auto add = [&](const std::vector<std::string>& sys, const std::vector<std::string>& lab, bool train) {
    for (std::size_t i = 0; i < sys.size(); ++i) {
      systems.push_back(parse_system(sys[i]));
      scatters.push_back(load_labeled_csv(lab[i]));
      training.push_back(train);
      run.input(sys[i]);
      run.input(lab[i]);
    }
  };
  add(a.train_systems, a.train_labeled, true);
  add(a.test_systems, a.test_labeled, false);
  if (systems.empty()) fail(ErrorCode::UsageError, "eval needs at least one system");

  std::vector<EvalCase> cases;
  for (std::size_t i = 0; i < systems.size(); ++i) cases.push_back({&systems[i], &scatters[i], training[i]});
  EvalOptions options;
  options.top_k = a.top;
  options.parallelism = g.parallel;
  options.importance = parse_importance(a.importance);
  const EvalReport report = eval_compare(cases, model, options);

  const std::string text = render_report_text(report);
  if (!g.out.empty()) {
    std::filesystem::path json_path = g.out;
    json_path.replace_extension(".json");
    std::ofstream json_out(json_path, std::ios::binary);
    if (!json_out) fail(ErrorCode::IoError, "cannot write " + json_path.string());
    json_out << report_to_json(report);
    run.output(json_path.string());
  }
  run.emit(text, out);
  return kSuccess;
}

int do_plot(const PlotArgs& a, const Globals& g, Run& run) {
  if (g.out.empty()) fail(ErrorCode::UsageError, "plot requires --out <file.svg>");
  const LabeledScatter labeled = load_labeled_csv(a.labeled);
  run.input(a.labeled);
  std::vector<PlacementOrder> highlights;
  for (const std::string& h : a.highlights) highlights.push_back(PlacementOrder::parse(h));
  if (!a.ranked.empty()) {
    // rank output: rank,order,score
    std::istringstream in(read_text(a.ranked));
    run.input(a.ranked);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto first = line.find(',');
      const auto second = line.find(',', first + 1);
      if (first == std::string::npos || second == std::string::npos) {
        fail(ErrorCode::MalformedFile, "bad ranked-orders line '" + line + "'");
      }
      highlights.push_back(PlacementOrder::parse(line.substr(first + 1, second - first - 1)));
    }
  }
  emit_scatter_plot(labeled, highlights, g.out, a.title);
  std::filesystem::path csv = g.out;
  csv.replace_extension(".csv");
  run.output(g.out);
  run.output(csv.string());
  run.finish();
  return kSuccess;
}

std::string json_error(std::string_view code, const std::string& message) {
  nlohmann::json line{{"error", code}, {"message", message}};
  return line.dump();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chipletrank: chiplet placement-order sweeps, labeling and ranking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random stream")->capture_default_str();
  app.add_option("--out", g.out, "Output file (stdout when omitted)");
  app.add_option("--parallel", g.parallel, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate placement orders through the placer");
  sweep_cmd->add_option("--system", sweep_args.system, "System JSON")->required();
  sweep_cmd->add_option("--orders", sweep_args.orders, "all | sampled | list")->capture_default_str();
  sweep_cmd->add_option("--max", sweep_args.max_orders, "Orders drawn with --orders sampled")->capture_default_str();
  sweep_cmd->add_option("--order-file", sweep_args.order_file, "One dash-separated order per line");
  sweep_cmd->add_option("--cap", sweep_args.cap, "Largest n enumerated by --orders all")->capture_default_str();
  sweep_cmd->add_option("--grid", sweep_args.placer.grid, "Placement cells per side")->capture_default_str();
  sweep_cmd->add_option("--spacing", sweep_args.placer.spacing, "Gap between chiplets, cells")->capture_default_str();
  sweep_cmd->add_option("--thermal-grid", sweep_args.thermal.grid, "Thermal samples per side")->capture_default_str();
  sweep_cmd->add_option("--kappa", sweep_args.thermal.kappa, "degC per W")->capture_default_str();
  sweep_cmd->add_option("--sigma0", sweep_args.thermal.sigma0, "Kernel width offset, mm")->capture_default_str();

  LabelArgs label_args;
  auto* label_cmd = app.add_subcommand("label", "Assign correlation levels to a sweep");
  label_cmd->add_option("--in", label_args.in, "Sweep CSV")->required();

  PairsArgs pairs_args;
  auto* pairs_cmd = app.add_subcommand("pairs", "Sample pairwise training comparisons");
  pairs_cmd->add_option("--system", pairs_args.systems, "System JSON (repeatable)")->required();
  pairs_cmd->add_option("--labeled", pairs_args.labeled, "Labeled CSV, one per --system")->required();
  pairs_cmd->add_option("--k", pairs_args.k, "Partners per point")->check(CLI::PositiveNumber)->capture_default_str();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train the ranking model");
  train_cmd->add_option("--system", train_args.systems, "System JSON (repeatable)")->required();
  train_cmd->add_option("--pairs", train_args.pairs, "Pairs file")->required();
  train_cmd->add_option("--pooling", train_args.pooling, "mean | sum | max")->capture_default_str();
  train_cmd->add_option("--iterations", train_args.iterations, "Minibatch steps")->capture_default_str();
  train_cmd->add_option("--batch", train_args.batch, "Pairs per step")->capture_default_str();
  train_cmd->add_option("--lr", train_args.lr, "Adam learning rate")->capture_default_str();

  RankArgs rank_args;
  auto* rank_cmd = app.add_subcommand("rank", "Rank candidate orders for a system");
  rank_cmd->add_option("--system", rank_args.system, "System JSON")->required();
  rank_cmd->add_option("--model", rank_args.model, "Model checkpoint")->required();
  rank_cmd->add_option("--candidates", rank_args.candidates, "all | sampled")->capture_default_str();
  rank_cmd->add_option("--max", rank_args.max_orders, "Candidates drawn with --candidates sampled")->capture_default_str();
  rank_cmd->add_option("--top", rank_args.top, "Orders to report (0 = all)")->capture_default_str();

  BaselineArgs baseline_args;
  auto* baseline_cmd = app.add_subcommand("baseline", "Importance x area baseline order");
  baseline_cmd->add_option("--system", baseline_args.system, "System JSON")->required();
  baseline_cmd->add_option("--importance", baseline_args.importance, "pagerank | degree")->capture_default_str();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Compare ranked orders with the baseline");
  eval_cmd->add_option("--train-system", eval_args.train_systems, "Training system JSON (repeatable)");
  eval_cmd->add_option("--train-labeled", eval_args.train_labeled, "Labeled CSV per training system");
  eval_cmd->add_option("--test-system", eval_args.test_systems, "Test system JSON (repeatable)");
  eval_cmd->add_option("--test-labeled", eval_args.test_labeled, "Labeled CSV per test system");
  eval_cmd->add_option("--model", eval_args.model, "Model checkpoint")->required();
  eval_cmd->add_option("--top", eval_args.top, "Ranked orders averaged per system")->check(CLI::PositiveNumber)->capture_default_str();
  eval_cmd->add_option("--importance", eval_args.importance, "pagerank | degree")->capture_default_str();

  PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot", "SVG scatter of a labeled sweep");
  plot_cmd->add_option("--labeled", plot_args.labeled, "Labeled CSV")->required();
  plot_cmd->add_option("--highlight", plot_args.highlights, "Order to mark (repeatable)");
  plot_cmd->add_option("--ranked", plot_args.ranked, "Mark every order of a rank CSV");
  plot_cmd->add_option("--title", plot_args.title, "Plot title");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << '\n';
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << json_error("UsageError", e.what()) << '\n';
    return kUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    Run run(sub->get_name(), args, g);
    const std::string name = sub->get_name();
    if (name == "sweep") return do_sweep(sweep_args, g, run, out);
    if (name == "label") return do_label(label_args, run, out, err);
    if (name == "pairs") return do_pairs(pairs_args, g, run, out);
    if (name == "train") return do_train(train_args, g, run, out, err);
    if (name == "rank") return do_rank(rank_args, g, run, out);
    if (name == "baseline") return do_baseline(baseline_args, run, out);
    if (name == "eval") return do_eval(eval_args, g, run, out);
    if (name == "plot") return do_plot(plot_args, g, run);
    err << json_error("UsageError", "unknown subcommand " + name) << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << json_error(to_string(e.code()), e.what()) << '\n';
    const bool usage = e.code() == ErrorCode::UsageError || e.code() == ErrorCode::InvalidConfig;
    return usage ? kUsage : kDataError;
  } catch (const std::exception& e) {
    err << json_error("Internal", e.what()) << '\n';
    return kInternal;
  }
}

}  // namespace chipletrank::cli

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "chipletrank/model.hpp"
#include "chipletrank/ordering.hpp"
#include "chipletrank/pareto.hpp"

namespace chipletrank {

struct Outcome {
  double temperature_c = 0.0;
  double wirelength_mm = 0.0;
  double level = 0.0;
};

struct EvalRow {
  std::string system_id;
  bool training = false;
  PlacementOrder baseline_order;
  std::vector<PlacementOrder> ranked;  // top-k, best first
  Outcome baseline;
  Outcome top1;
  Outcome top_k;  // mean over `ranked`
  int max_level = 0;
  double median_level = 0.0;
  double pairwise_accuracy = 0.0;
};

struct SplitSummary {
  std::size_t systems = 0;
  Outcome baseline;
  Outcome top1;
  Outcome top_k;
  double top1_t_pct = 0.0;
  double top1_wl_pct = 0.0;
  double top_k_t_pct = 0.0;
  double top_k_wl_pct = 0.0;
  double pairwise_accuracy = 0.0;
};

struct EvalReport {
  std::string pooling;
  std::size_t top_k = 5;
  std::vector<EvalRow> rows;
  SplitSummary training;
  SplitSummary testing;
};

/// (method - baseline) / baseline * 100.
double percent_delta(double baseline, double method);

/// Two decimals with sign, e.g. "-1.95%".
std::string format_percent(double percent);

/// Column means of a group of rows, then percentage deltas of the means.
SplitSummary summarize(std::span<const EvalRow> rows);

struct EvalCase {
  const ChipletSystem* system = nullptr;
  const LabeledScatter* scatter = nullptr;
  bool training = false;
};

struct EvalOptions {
  std::size_t top_k = 5;
  int parallelism = 1;
  Importance importance = Importance::PageRank;
};

/// Baseline vs ranked orders, looked up in each system's full labeled sweep.
EvalReport eval_compare(std::span<const EvalCase> cases, const RankModel& model,
                        const EvalOptions& options = {});

std::string render_report_text(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace chipletrank

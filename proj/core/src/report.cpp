#include "chipletrank/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "chipletrank/error.hpp"
#include "chipletrank/ranking.hpp"

namespace chipletrank {

using json = nlohmann::json;

double percent_delta(double baseline, double method) {
  return (method - baseline) / baseline * 100.0;
}

std::string format_percent(double percent) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.2f%%", percent);
  std::string out = buf;
  if (out == "-0.00%") out = "+0.00%";
  return out;
}

namespace {

Outcome mean_of(std::span<const EvalRow> rows, Outcome EvalRow::*field) {
  Outcome m;
  for (const EvalRow& r : rows) {
    m.temperature_c += (r.*field).temperature_c;
    m.wirelength_mm += (r.*field).wirelength_mm;
    m.level += (r.*field).level;
  }
  const double n = static_cast<double>(rows.size());
  m.temperature_c /= n;
  m.wirelength_mm /= n;
  m.level /= n;
  return m;
}

Outcome lookup(const std::map<PlacementOrder, std::size_t>& index, const LabeledScatter& s,
               const PlacementOrder& order, const std::string& system_id) {
  const auto it = index.find(order);
  if (it == index.end()) {
    fail(ErrorCode::MissingSweep, "order " + order.to_string() + " of system '" + system_id +
                                      "' is not in its sweep; evaluation needs a full sweep");
  }
  const ScatterPoint& p = s.points[it->second];
  return Outcome{p.temperature_c, p.wirelength_mm, static_cast<double>(s.level[it->second])};
}

double median(std::vector<int> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

SplitSummary summarize(std::span<const EvalRow> rows) {
  SplitSummary s;
  s.systems = rows.size();
  if (rows.empty()) return s;
  s.baseline = mean_of(rows, &EvalRow::baseline);
  s.top1 = mean_of(rows, &EvalRow::top1);
  s.top_k = mean_of(rows, &EvalRow::top_k);
  s.top1_t_pct = percent_delta(s.baseline.temperature_c, s.top1.temperature_c);
  s.top1_wl_pct = percent_delta(s.baseline.wirelength_mm, s.top1.wirelength_mm);
  s.top_k_t_pct = percent_delta(s.baseline.temperature_c, s.top_k.temperature_c);
  s.top_k_wl_pct = percent_delta(s.baseline.wirelength_mm, s.top_k.wirelength_mm);
  for (const EvalRow& r : rows) s.pairwise_accuracy += r.pairwise_accuracy;
  s.pairwise_accuracy /= static_cast<double>(rows.size());
  return s;
}

EvalReport eval_compare(std::span<const EvalCase> cases, const RankModel& model,
                        const EvalOptions& options) {
  EvalReport report;
  report.pooling = std::string(to_string(model.pooling));
  report.top_k = options.top_k;

  for (const EvalCase& c : cases) {
    const ChipletSystem& system = *c.system;
    const LabeledScatter& scatter = *c.scatter;
    if (scatter.points.empty()) fail(ErrorCode::EmptyScatter, "system '" + system.name + "' has an empty sweep");

    std::map<PlacementOrder, std::size_t> index;
    for (std::size_t i = 0; i < scatter.points.size(); ++i) index.emplace(scatter.points[i].order, i);

    EvalRow row;
    row.system_id = system.name;
    row.training = c.training;
    row.baseline_order = baseline_order(system, options.importance);
    row.baseline = lookup(index, scatter, row.baseline_order, system.name);

    const auto ranked =
        rank_orders(system, model, OrderSource::all(), options.top_k, options.parallelism);
    for (const RankedOrder& r : ranked) row.ranked.push_back(r.order);
    row.top1 = lookup(index, scatter, row.ranked.front(), system.name);
    for (const PlacementOrder& o : row.ranked) {
      const Outcome x = lookup(index, scatter, o, system.name);
      row.top_k.temperature_c += x.temperature_c;
      row.top_k.wirelength_mm += x.wirelength_mm;
      row.top_k.level += x.level;
    }
    const double k = static_cast<double>(row.ranked.size());
    row.top_k.temperature_c /= k;
    row.top_k.wirelength_mm /= k;
    row.top_k.level /= k;

    row.max_level = *std::max_element(scatter.level.begin(), scatter.level.end());
    row.median_level = median(scatter.level);
    row.pairwise_accuracy =
        pairwise_accuracy(scatter, score_scatter(system, model, scatter, options.parallelism));
    report.rows.push_back(std::move(row));
  }

  std::vector<EvalRow> train_rows;
  std::vector<EvalRow> test_rows;
  for (const EvalRow& r : report.rows) (r.training ? train_rows : test_rows).push_back(r);
  report.training = summarize(train_rows);
  report.testing = summarize(test_rows);
  return report;
}

namespace {

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

void outcome_cells(std::ostringstream& out, const Outcome& o) {
  char buf[128];
  std::snprintf(buf, sizeof buf, " %8.2f %11.2f %5.1f |", o.temperature_c, o.wirelength_mm, o.level);
  out << buf;
}

void summary_lines(std::ostringstream& out, const char* label, const SplitSummary& s) {
  if (s.systems == 0) return;
  char head[64];
  std::snprintf(head, sizeof head, "%-18s|", label);
  out << head;
  outcome_cells(out, s.baseline);
  outcome_cells(out, s.top1);
  outcome_cells(out, s.top_k);
  out << ' ' << fixed(s.pairwise_accuracy, 3) << '\n';
  const std::string top1 = "(" + format_percent(s.top1_t_pct) + ") (" + format_percent(s.top1_wl_pct) + ")";
  const std::string top_k = "(" + format_percent(s.top_k_t_pct) + ") (" + format_percent(s.top_k_wl_pct) + ")";
  char deltas[200];
  std::snprintf(deltas, sizeof deltas, "%-18s|%28s| %-27s| %-27s|\n", "", "", top1.c_str(), top_k.c_str());
  out << deltas;
}

json outcome_json(const Outcome& o) {
  return {{"temperature_c", o.temperature_c}, {"wirelength_mm", o.wirelength_mm}, {"level", o.level}};
}

json summary_json(const SplitSummary& s) {
  return {{"systems", s.systems},
          {"baseline", outcome_json(s.baseline)},
          {"top1", outcome_json(s.top1)},
          {"top_k", outcome_json(s.top_k)},
          {"top1_temperature_pct", fixed(s.top1_t_pct, 2)},
          {"top1_wirelength_pct", fixed(s.top1_wl_pct, 2)},
          {"top_k_temperature_pct", fixed(s.top_k_t_pct, 2)},
          {"top_k_wirelength_pct", fixed(s.top_k_wl_pct, 2)},
          {"pairwise_accuracy", s.pairwise_accuracy}};
}

}  // namespace

std::string render_report_text(const EvalReport& report) {
  std::ostringstream out;
  out << "pooling: " << report.pooling << "   top-k: " << report.top_k << "\n";
  char header[256];
  std::snprintf(header, sizeof header, "%-18s| %-26s | %-26s | %-26s | %s\n", "system",
                "baseline  T(C)  WL(mm)  L", "top-1  T(C)  WL(mm)  L",
                ("top-" + std::to_string(report.top_k) + " mean  T  WL  L").c_str(), "pair-acc");
  out << header;
  for (int split = 1; split >= 0; --split) {
    for (const EvalRow& r : report.rows) {
      if (r.training != static_cast<bool>(split)) continue;
      char head[64];
      std::snprintf(head, sizeof head, "%-18s|", r.system_id.substr(0, 18).c_str());
      out << head;
      outcome_cells(out, r.baseline);
      outcome_cells(out, r.top1);
      outcome_cells(out, r.top_k);
      out << ' ' << fixed(r.pairwise_accuracy, 3) << '\n';
    }
    summary_lines(out, split ? "Training-average" : "Testing-average",
                  split ? report.training : report.testing);
  }
  return out.str();
}

std::string report_to_json(const EvalReport& report) {
  json doc;
  doc["pooling"] = report.pooling;
  doc["top_k"] = report.top_k;
  json rows = json::array();
  for (const EvalRow& r : report.rows) {
    json ranked = json::array();
    for (const PlacementOrder& o : r.ranked) ranked.push_back(o.to_string());
    rows.push_back({{"system", r.system_id},
                    {"split", r.training ? "train" : "test"},
                    {"baseline_order", r.baseline_order.to_string()},
                    {"ranked_orders", ranked},
                    {"baseline", outcome_json(r.baseline)},
                    {"top1", outcome_json(r.top1)},
                    {"top_k", outcome_json(r.top_k)},
                    {"max_level", r.max_level},
                    {"median_level", r.median_level},
                    {"pairwise_accuracy", r.pairwise_accuracy}});
  }
  doc["rows"] = std::move(rows);
  doc["training"] = summary_json(report.training);
  doc["testing"] = summary_json(report.testing);
  return doc.dump(2) + "\n";
}

}  // namespace chipletrank

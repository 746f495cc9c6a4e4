#include "chipletrank/scatter_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "chipletrank/error.hpp"

namespace chipletrank {

namespace {

constexpr std::string_view kSweepHeader = "order,temperature_c,wirelength_mm";
constexpr std::string_view kLabeledHeader = "order,temperature_c,wirelength_mm,slack,level";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    fail(ErrorCode::MalformedFile,
         "line " + std::to_string(line_no) + ": bad number '" + std::string(field) + "'");
  }
  return value;
}

int parse_int(std::string_view field, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    fail(ErrorCode::MalformedFile,
         "line " + std::to_string(line_no) + ": bad integer '" + std::string(field) + "'");
  }
  return value;
}

/// Rows after the header, with trailing CR stripped and blank lines skipped.
std::vector<std::pair<std::size_t, std::string>> body_lines(std::istream& in,
                                                            std::string_view header) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::size_t, std::string>> rows;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) {
        fail(ErrorCode::MalformedFile,
             "expected header '" + std::string(header) + "', got '" + line + "'");
      }
      seen_header = true;
      continue;
    }
    rows.emplace_back(line_no, line);
  }
  if (!seen_header) fail(ErrorCode::MalformedFile, "missing CSV header");
  return rows;
}

ScatterPoint parse_point(const std::vector<std::string_view>& fields, std::size_t line_no) {
  ScatterPoint p;
  try {
    p.order = PlacementOrder::parse(fields[0]);
  } catch (const Error& e) {
    fail(ErrorCode::MalformedFile, "line " + std::to_string(line_no) + ": " + e.what());
  }
  p.temperature_c = parse_double(fields[1], line_no);
  p.wirelength_mm = parse_double(fields[2], line_no);
  return p;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  return in;
}

}  // namespace

std::string format_g6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void write_sweep_csv(std::ostream& out, const ScatterSet& points) {
  out << kSweepHeader << '\n';
  for (const ScatterPoint& p : points) {
    out << p.order.to_string() << ',' << format_g6(p.temperature_c) << ','
        << format_g6(p.wirelength_mm) << '\n';
  }
}

ScatterSet read_sweep_csv(std::istream& in) {
  ScatterSet points;
  for (const auto& [line_no, line] : body_lines(in, kSweepHeader)) {
    const auto fields = split(line, ',');
    if (fields.size() != 3) {
      fail(ErrorCode::MalformedFile, "line " + std::to_string(line_no) + ": expected 3 fields");
    }
    points.push_back(parse_point(fields, line_no));
  }
  return points;
}

void write_labeled_csv(std::ostream& out, const LabeledScatter& labeled) {
  out << kLabeledHeader << '\n';
  for (std::size_t i = 0; i < labeled.points.size(); ++i) {
    const ScatterPoint& p = labeled.points[i];
    out << p.order.to_string() << ',' << format_g6(p.temperature_c) << ','
        << format_g6(p.wirelength_mm) << ',' << format_g6(labeled.slack[i]) << ','
        << labeled.level[i] << '\n';
  }
}

LabeledScatter read_labeled_csv(std::istream& in) {
  LabeledScatter labeled;
  for (const auto& [line_no, line] : body_lines(in, kLabeledHeader)) {
    const auto fields = split(line, ',');
    if (fields.size() != 5) {
      fail(ErrorCode::MalformedFile, "line " + std::to_string(line_no) + ": expected 5 fields");
    }
    labeled.points.push_back(parse_point(fields, line_no));
    labeled.slack.push_back(parse_double(fields[3], line_no));
    const int level = parse_int(fields[4], line_no);
    if (level < 0 || level > kMaxLevel) {
      fail(ErrorCode::MalformedFile, "line " + std::to_string(line_no) + ": level out of range");
    }
    labeled.level.push_back(level);
  }
  return labeled;
}

void save_sweep_csv(const std::filesystem::path& path, const ScatterSet& points) {
  auto out = open_out(path);
  write_sweep_csv(out, points);
  if (!out) fail(ErrorCode::IoError, "write failed: " + path.string());
}

ScatterSet load_sweep_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_sweep_csv(in);
}

void save_labeled_csv(const std::filesystem::path& path, const LabeledScatter& labeled) {
  auto out = open_out(path);
  write_labeled_csv(out, labeled);
  if (!out) fail(ErrorCode::IoError, "write failed: " + path.string());
}

LabeledScatter load_labeled_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labeled_csv(in);
}

}  // namespace chipletrank

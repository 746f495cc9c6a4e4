#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "chipletrank/pareto.hpp"

namespace chipletrank {

/// Six significant digits, as used by every CSV the tool writes.
std::string format_g6(double value);

// Sweep CSV:   order,temperature_c,wirelength_mm
// Labeled CSV: order,temperature_c,wirelength_mm,slack,level
void write_sweep_csv(std::ostream& out, const ScatterSet& points);
ScatterSet read_sweep_csv(std::istream& in);

void write_labeled_csv(std::ostream& out, const LabeledScatter& labeled);
LabeledScatter read_labeled_csv(std::istream& in);

void save_sweep_csv(const std::filesystem::path& path, const ScatterSet& points);
ScatterSet load_sweep_csv(const std::filesystem::path& path);
void save_labeled_csv(const std::filesystem::path& path, const LabeledScatter& labeled);
LabeledScatter load_labeled_csv(const std::filesystem::path& path);

}  // namespace chipletrank

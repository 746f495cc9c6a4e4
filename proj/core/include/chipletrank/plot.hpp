#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "chipletrank/pareto.hpp"

namespace chipletrank {

/// SVG scatter of WL (x) against T (y): one marker per point colored by
/// level, the Pareto front as a polyline, highlighted orders drawn as
/// labeled stars. Output is a pure function of its inputs.
std::string render_scatter_svg(const LabeledScatter& labeled,
                               std::span<const PlacementOrder> highlights,
                               const std::string& title = {});

/// Companion data: order,temperature_c,wirelength_mm,slack,level,front,highlight
std::string render_scatter_csv(const LabeledScatter& labeled,
                               std::span<const PlacementOrder> highlights);

/// Writes `path` (SVG) and the same path with a .csv extension.
void emit_scatter_plot(const LabeledScatter& labeled,
                       std::span<const PlacementOrder> highlights,
                       const std::filesystem::path& path, const std::string& title = {});

}  // namespace chipletrank

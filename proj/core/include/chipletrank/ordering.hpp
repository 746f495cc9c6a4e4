#pragma once

#include <string_view>
#include <vector>

#include "chipletrank/system.hpp"

namespace chipletrank {

enum class Importance { PageRank, Degree };

Importance parse_importance(std::string_view text);

struct PageRankConfig {
  double damping = 0.85;
  double tolerance = 1e-9;  // L1 change between sweeps
  int max_iterations = 100000;
};

/// PageRank on the undirected wire-weighted chiplet graph. Nodes without
/// nets spread their mass uniformly over all nodes.
std::vector<double> pagerank(const ChipletSystem& system, const PageRankConfig& config = {});

std::vector<double> weighted_degree(const ChipletSystem& system);

/// Chiplets by descending importance x area; equal keys keep index order.
PlacementOrder baseline_order(const ChipletSystem& system,
                              Importance importance = Importance::PageRank);

}  // namespace chipletrank

// Seeded generator for the bundled synthetic systems in data/systems.
#include <cmath>
#include <algorithm>
#include <filesystem>
#include <optional>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chipletrank/error.hpp"
#include "chipletrank/pareto.hpp"
#include "chipletrank/placer.hpp"
#include "chipletrank/random.hpp"
#include "chipletrank/system.hpp"

namespace {

using namespace chipletrank;

enum class Topology { Hub, Chain, Clusters, Dense };

struct Profile {
  std::string name;
  int chiplets;
  Topology topology;
  double fill;        // chiplet area / interposer area
  double total_power; // watts
};

// Divides rather than multiplies so 5.1 prints as 5.1.
double round_to(double x, double step) { return std::round(x / step) / (1.0 / step); }

std::optional<ScatterSet> full_sweep(const ChipletSystem& system) {
  try {
    return sweep(system, OrderSource::all());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Unplaceable) throw;
    return std::nullopt;
  }
}

// A system whose typical order already sits at level 9 or 10 leaves a ranker
// nothing to improve on, so such draws are rejected.
bool has_headroom(const ScatterSet& points) {
  std::vector<int> level = assign_levels(points).level;
  std::nth_element(level.begin(), level.begin() + level.size() / 2, level.end());
  return level[level.size() / 2] <= kMaxLevel - 2;
}

std::vector<Net> make_nets(Topology topology, int n, Rng& rng) {
  std::vector<Net> nets;
  auto add = [&](int a, int b, int lo, int hi) {
    nets.push_back({a, b, lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)))});
  };
  switch (topology) {
    case Topology::Hub:
      for (int i = 1; i < n; ++i) add(0, i, 40, 200);
      add(1 + static_cast<int>(rng.below(n - 1)), 1 + static_cast<int>(rng.below(n - 1)), 5, 30);
      break;
    case Topology::Chain:
      for (int i = 0; i + 1 < n; ++i) add(i, i + 1, 30, 180);
      add(0, n - 1, 5, 20);
      break;
    case Topology::Clusters: {
      const int half = n / 2;
      for (int i = 0; i < half; ++i)
        for (int j = i + 1; j < half; ++j) add(i, j, 30, 150);
      for (int i = half; i < n; ++i)
        for (int j = i + 1; j < n; ++j) add(i, j, 30, 150);
      add(0, half, 10, 40);
      break;
    }
    case Topology::Dense:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (rng.unit() < 0.6) add(i, j, 5, 120);
      for (int i = 0; i + 1 < n; ++i) add(i, i + 1, 5, 40);
      break;
  }
  // Self-loops from the hub extra edge are dropped.
  std::erase_if(nets, [](const Net& net) { return net.a == net.b; });
  return nets;
}

std::optional<ChipletSystem> generate(const Profile& profile, std::uint64_t seed) {
  Rng rng(seed);
  const int n = profile.chiplets;
  std::vector<Chiplet> chiplets;
  std::vector<double> weight;
  double area = 0.0;
  double weight_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    Chiplet c;
    c.name = profile.name + "_c" + std::to_string(i);
    const double side = rng.uniform(3.0, 12.0);
    const double aspect = rng.uniform(0.5, 2.0);
    c.width_mm = round_to(side * std::sqrt(aspect), 0.1);
    c.length_mm = round_to(side / std::sqrt(aspect), 0.1);
    area += c.area();
    // Power density varies by an order of magnitude between dies.
    weight.push_back(c.area() * std::exp(rng.uniform(-1.2, 1.2)));
    weight_sum += weight.back();
    chiplets.push_back(std::move(c));
  }
  for (int i = 0; i < n; ++i) {
    chiplets[i].power_w = std::max(0.05, round_to(profile.total_power * weight[i] / weight_sum, 0.01));
  }
  const double side = std::sqrt(area / profile.fill);
  Interposer interposer;
  interposer.width_mm = round_to(side * rng.uniform(0.9, 1.1), 0.5);
  interposer.height_mm = round_to(area / profile.fill / interposer.width_mm, 0.5);
  ChipletSystem system =
      make_system(profile.name, interposer, std::move(chiplets), make_nets(profile.topology, n, rng));
  std::optional<ScatterSet> points;
  while (!(points = full_sweep(system))) {
    system.interposer.width_mm = round_to(system.interposer.width_mm * 1.05, 0.5);
    system.interposer.height_mm = round_to(system.interposer.height_mm * 1.05, 0.5);
  }
  if (!has_headroom(*points)) return std::nullopt;
  return system;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the bundled synthetic chiplet systems"};
  std::string out_dir = "data/systems";
  std::uint64_t seed = 2024;
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Base seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const std::vector<Profile> profiles{
      {"case1", 6, Topology::Hub, 0.30, 2.2},      {"case2", 6, Topology::Chain, 0.28, 2.6},
      {"case3", 6, Topology::Clusters, 0.32, 2.4}, {"case4", 6, Topology::Dense, 0.30, 2.0},
      {"case5", 6, Topology::Hub, 0.26, 2.8},      {"case6", 6, Topology::Chain, 0.33, 2.2},
      {"case7", 6, Topology::Dense, 0.29, 2.5},    {"case8", 5, Topology::Clusters, 0.30, 2.0},
      {"case9", 7, Topology::Hub, 0.30, 2.6},
  };
  try {
    std::filesystem::create_directories(out_dir);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      std::optional<ChipletSystem> drawn;
      for (std::uint64_t attempt = 0; !drawn; ++attempt) {
        drawn = generate(profiles[i], seed * 1000003ULL + i + attempt * 7919ULL);
      }
      const ChipletSystem& system = *drawn;
      const auto path = std::filesystem::path(out_dir) / (system.name + ".json");
      std::ofstream out(path);
      out << serialize_system(system);
      if (!out) chipletrank::fail(ErrorCode::IoError, "cannot write " + path.string());
      std::cout << path.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}

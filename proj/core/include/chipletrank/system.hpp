#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chipletrank {

struct Chiplet {
  std::string name;
  double width_mm = 0.0;   // x extent
  double length_mm = 0.0;  // y extent
  double power_w = 0.0;

  double area() const noexcept { return width_mm * length_mm; }
  bool operator==(const Chiplet&) const = default;
};

/// Undirected interconnect between two chiplets. Canonical form has a < b.
struct Net {
  int a = 0;
  int b = 0;
  int wires = 1;

  bool operator==(const Net&) const = default;
};

struct Interposer {
  double width_mm = 0.0;
  double height_mm = 0.0;
  double ambient_c = 45.0;

  double area() const noexcept { return width_mm * height_mm; }
  bool operator==(const Interposer&) const = default;
};

/// A validated problem instance. Build through make_system() or
/// parse_system(); both canonicalize the net list (a < b, merged, sorted).
struct ChipletSystem {
  std::string name;
  Interposer interposer;
  std::vector<Chiplet> chiplets;
  std::vector<Net> nets;

  std::size_t size() const noexcept { return chiplets.size(); }
  bool operator==(const ChipletSystem&) const = default;
};

/// Permutation of chiplet indices; position t holds the chiplet placed at
/// step t + 1.
class PlacementOrder {
 public:
  PlacementOrder() = default;
  explicit PlacementOrder(std::vector<int> sequence) : seq_(std::move(sequence)) {}

  static PlacementOrder identity(std::size_t n);
  /// Parses the dash-separated form, e.g. "2-0-1".
  static PlacementOrder parse(std::string_view text);

  std::span<const int> indices() const noexcept { return seq_; }
  const std::vector<int>& sequence() const noexcept { return seq_; }
  std::size_t size() const noexcept { return seq_.size(); }
  int operator[](std::size_t t) const { return seq_[t]; }

  std::string to_string() const;

  auto operator<=>(const PlacementOrder&) const = default;
  bool operator==(const PlacementOrder&) const = default;

 private:
  std::vector<int> seq_;
};

/// Validates every invariant, merges duplicate nets by summing their wires
/// and canonicalizes the net list. Throws Error(InvalidSystem).
ChipletSystem make_system(std::string name, Interposer interposer,
                          std::vector<Chiplet> chiplets, std::vector<Net> nets);

ChipletSystem parse_system(const std::filesystem::path& path);
ChipletSystem parse_system_json(std::string_view text);
std::string serialize_system(const ChipletSystem& system);

/// Throws Error(InvalidOrder) unless `order` is a permutation of 0..n-1.
void validate_order(const ChipletSystem& system, const PlacementOrder& order);

int total_wires(const ChipletSystem& system) noexcept;

}  // namespace chipletrank

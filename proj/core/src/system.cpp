#include "chipletrank/system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "chipletrank/error.hpp"

namespace chipletrank {

using nlohmann::json;

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::InvalidSystem: return "InvalidSystem";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Unplaceable: return "Unplaceable";
    case ErrorCode::TooManyOrders: return "TooManyOrders";
    case ErrorCode::EmptyScatter: return "EmptyScatter";
    case ErrorCode::NoComparablePairs: return "NoComparablePairs";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MalformedCheckpoint: return "MalformedCheckpoint";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::MissingSweep: return "MissingSweep";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

PlacementOrder PlacementOrder::identity(std::size_t n) {
  std::vector<int> seq(n);
  for (std::size_t i = 0; i < n; ++i) seq[i] = static_cast<int>(i);
  return PlacementOrder(std::move(seq));
}

PlacementOrder PlacementOrder::parse(std::string_view text) {
  std::vector<int> seq;
  if (text.empty()) fail(ErrorCode::InvalidOrder, "empty placement order");
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t dash = std::min(text.find('-', start), text.size());
    const std::string_view token = text.substr(start, dash - start);
    if (token.empty() || token.size() > 6 ||
        !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      fail(ErrorCode::InvalidOrder, "bad placement order '" + std::string(text) + "'");
    }
    seq.push_back(std::stoi(std::string(token)));
    start = dash + 1;
  }
  return PlacementOrder(std::move(seq));
}

std::string PlacementOrder::to_string() const {
  std::string out;
  for (std::size_t t = 0; t < seq_.size(); ++t) {
    if (t) out += '-';
    out += std::to_string(seq_[t]);
  }
  return out;
}

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  fail(ErrorCode::InvalidSystem, field + ": " + what);
}

}  // namespace

ChipletSystem make_system(std::string name, Interposer interposer,
                          std::vector<Chiplet> chiplets, std::vector<Net> nets) {
  if (!positive_finite(interposer.width_mm)) invalid("interposer.width_mm", "must be > 0");
  if (!positive_finite(interposer.height_mm)) invalid("interposer.height_mm", "must be > 0");
  if (!std::isfinite(interposer.ambient_c)) invalid("interposer.ambient_c", "must be finite");
  if (chiplets.empty()) invalid("chiplets", "at least one chiplet is required");

  std::set<std::string> names;
  double total_area = 0.0;
  for (std::size_t i = 0; i < chiplets.size(); ++i) {
    const Chiplet& c = chiplets[i];
    const std::string field = "chiplets[" + std::to_string(i) + "]";
    if (!positive_finite(c.width_mm)) invalid(field + ".width_mm", "must be > 0");
    if (!positive_finite(c.length_mm)) invalid(field + ".length_mm", "must be > 0");
    if (!std::isfinite(c.power_w) || c.power_w < 0.0) invalid(field + ".power_w", "must be >= 0");
    if (!names.insert(c.name).second) invalid(field + ".name", "duplicate name '" + c.name + "'");
    total_area += c.area();
  }
  if (total_area > interposer.area()) {
    std::ostringstream msg;
    msg << "total chiplet area " << total_area << " mm^2 exceeds interposer area "
        << interposer.area() << " mm^2";
    invalid("chiplets", msg.str());
  }

  const int n = static_cast<int>(chiplets.size());
  std::map<std::pair<int, int>, long long> merged;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    const Net& net = nets[i];
    const std::string field = "nets[" + std::to_string(i) + "]";
    if (net.a < 0 || net.a >= n) invalid(field + ".a", "index out of range");
    if (net.b < 0 || net.b >= n) invalid(field + ".b", "index out of range");
    if (net.a == net.b) invalid(field, "self-loop");
    if (net.wires < 1) invalid(field + ".wires", "must be >= 1");
    merged[{std::min(net.a, net.b), std::max(net.a, net.b)}] += net.wires;
  }

  std::vector<Net> canonical;
  canonical.reserve(merged.size());
  for (const auto& [key, wires] : merged) {
    if (wires > std::numeric_limits<int>::max()) invalid("nets", "wire count overflow");
    canonical.push_back(Net{key.first, key.second, static_cast<int>(wires)});
  }

  return ChipletSystem{std::move(name), interposer, std::move(chiplets), std::move(canonical)};
}

namespace {

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& item : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      fail(ErrorCode::MalformedFile, where + ": unknown key '" + item.key() + "'");
    }
  }
}

const json& member(const json& object, const char* key, const std::string& where) {
  const auto it = object.find(key);
  if (it == object.end()) fail(ErrorCode::MalformedFile, where + ": missing key '" + key + "'");
  return *it;
}

double number(const json& object, const char* key, const std::string& where) {
  const json& v = member(object, key, where);
  if (!v.is_number()) fail(ErrorCode::MalformedFile, where + "." + key + ": expected a number");
  return v.get<double>();
}

int integer(const json& object, const char* key, const std::string& where) {
  const json& v = member(object, key, where);
  if (!v.is_number_integer()) {
    fail(ErrorCode::MalformedFile, where + "." + key + ": expected an integer");
  }
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    fail(ErrorCode::MalformedFile, where + "." + key + ": integer out of range");
  }
  return static_cast<int>(x);
}

std::string text(const json& object, const char* key, const std::string& where) {
  const json& v = member(object, key, where);
  if (!v.is_string()) fail(ErrorCode::MalformedFile, where + "." + key + ": expected a string");
  return v.get<std::string>();
}

const json& object_member(const json& object, const char* key, const std::string& where) {
  const json& v = member(object, key, where);
  if (!v.is_object()) fail(ErrorCode::MalformedFile, where + "." + key + ": expected an object");
  return v;
}

const json& array_member(const json& object, const char* key, const std::string& where) {
  const json& v = member(object, key, where);
  if (!v.is_array()) fail(ErrorCode::MalformedFile, where + "." + key + ": expected an array");
  return v;
}

}  // namespace

ChipletSystem parse_system_json(std::string_view text_view) {
  json doc;
  try {
    doc = json::parse(text_view.begin(), text_view.end());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedFile, std::string("system file: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::MalformedFile, "system file: top level must be an object");
  reject_unknown_keys(doc, {"name", "interposer", "chiplets", "nets"}, "system");

  const std::string name = text(doc, "name", "system");

  const json& ip = object_member(doc, "interposer", "system");
  reject_unknown_keys(ip, {"width_mm", "height_mm", "ambient_c"}, "interposer");
  Interposer interposer{number(ip, "width_mm", "interposer"), number(ip, "height_mm", "interposer")};
  if (ip.contains("ambient_c")) interposer.ambient_c = number(ip, "ambient_c", "interposer");

  std::vector<Chiplet> chiplets;
  const json& cs = array_member(doc, "chiplets", "system");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string where = "chiplets[" + std::to_string(i) + "]";
    if (!cs[i].is_object()) fail(ErrorCode::MalformedFile, where + ": expected an object");
    reject_unknown_keys(cs[i], {"name", "width_mm", "length_mm", "power_w"}, where);
    chiplets.push_back(Chiplet{text(cs[i], "name", where), number(cs[i], "width_mm", where),
                               number(cs[i], "length_mm", where),
                               number(cs[i], "power_w", where)});
  }

  std::vector<Net> nets;
  const json& ns = array_member(doc, "nets", "system");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const std::string where = "nets[" + std::to_string(i) + "]";
    if (!ns[i].is_object()) fail(ErrorCode::MalformedFile, where + ": expected an object");
    reject_unknown_keys(ns[i], {"a", "b", "wires"}, where);
    nets.push_back(Net{integer(ns[i], "a", where), integer(ns[i], "b", where),
                       integer(ns[i], "wires", where)});
  }

  return make_system(name, interposer, std::move(chiplets), std::move(nets));
}

ChipletSystem parse_system(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read system file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_system_json(buffer.str());
}

std::string serialize_system(const ChipletSystem& system) {
  json doc;
  doc["name"] = system.name;
  doc["interposer"] = {{"width_mm", system.interposer.width_mm},
                       {"height_mm", system.interposer.height_mm},
                       {"ambient_c", system.interposer.ambient_c}};
  json chiplets = json::array();
  for (const Chiplet& c : system.chiplets) {
    chiplets.push_back({{"name", c.name},
                        {"width_mm", c.width_mm},
                        {"length_mm", c.length_mm},
                        {"power_w", c.power_w}});
  }
  doc["chiplets"] = std::move(chiplets);
  json nets = json::array();
  for (const Net& n : system.nets) nets.push_back({{"a", n.a}, {"b", n.b}, {"wires", n.wires}});
  doc["nets"] = std::move(nets);
  return doc.dump(2) + "\n";
}

void validate_order(const ChipletSystem& system, const PlacementOrder& order) {
  const std::size_t n = system.size();
  if (order.size() != n) {
    fail(ErrorCode::InvalidOrder, "order " + order.to_string() + " has " +
                                      std::to_string(order.size()) + " entries, expected " +
                                      std::to_string(n));
  }
  std::vector<bool> seen(n, false);
  for (int idx : order.indices()) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= n) {
      fail(ErrorCode::InvalidOrder,
           "order " + order.to_string() + ": index " + std::to_string(idx) + " out of range");
    }
    if (seen[idx]) {
      fail(ErrorCode::InvalidOrder,
           "order " + order.to_string() + ": index " + std::to_string(idx) + " repeated");
    }
    seen[idx] = true;
  }
}

int total_wires(const ChipletSystem& system) noexcept {
  int total = 0;
  for (const Net& n : system.nets) total += n.wires;
  return total;
}

}  // namespace chipletrank

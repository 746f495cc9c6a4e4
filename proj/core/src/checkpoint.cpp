#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chipletrank/error.hpp"
#include "chipletrank/model.hpp"

namespace chipletrank {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "chipletrank-model";

json array_of(std::span<const double> values) { return json(std::vector<double>(values.begin(), values.end())); }

[[noreturn]] void malformed(const std::string& what) {
  fail(ErrorCode::MalformedCheckpoint, "checkpoint: " + what);
}

std::vector<double> doubles(const json& doc, const char* key, std::size_t expected) {
  const auto it = doc.find(key);
  if (it == doc.end() || !it->is_array()) malformed(std::string("missing array '") + key + "'");
  if (it->size() != expected) {
    malformed(std::string("'") + key + "' has " + std::to_string(it->size()) + " entries, expected " +
              std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const json& v : *it) {
    if (!v.is_number()) malformed(std::string("non-numeric entry in '") + key + "'");
    const double x = v.get<double>();
    if (!std::isfinite(x)) malformed(std::string("non-finite entry in '") + key + "'");
    out.push_back(x);
  }
  return out;
}

double scalar(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || !it->is_number()) malformed(std::string("missing number '") + key + "'");
  return it->get<double>();
}

}  // namespace

std::string model_to_json(const RankModel& model) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kCheckpointVersion;
  doc["pooling"] = std::string(to_string(model.pooling));
  doc["node_features"] = kNodeFeatures;
  doc["scaler"] = {{"node_min", array_of(model.scaler.node_min)},
                   {"node_max", array_of(model.scaler.node_max)},
                   {"edge_min", model.scaler.edge_min},
                   {"edge_max", model.scaler.edge_max}};
  json layers = json::array();
  for (std::size_t l = 0; l < kLayers; ++l) {
    const LayerShape& s = layer_shapes()[l];
    layers.push_back({{"kind", s.graph ? "sage" : "dense"},
                      {"in", s.in},
                      {"out", s.out},
                      {"weight", array_of(model.weights(l))},
                      {"bias", array_of(model.bias(l))}});
  }
  doc["layers"] = std::move(layers);
  doc["meta"] = {{"seed", model.meta.seed},
                 {"iterations", model.meta.iterations},
                 {"loss_history", model.meta.loss_history}};
  return doc.dump(1) + "\n";
}

namespace {

RankModel parse_checkpoint(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  if (!doc.is_object()) malformed("top level must be an object");
  if (doc.value("format", std::string()) != kFormat) malformed("not a chipletrank model");
  const auto version = doc.find("version");
  if (version == doc.end() || !version->is_number_integer()) malformed("missing version");
  if (version->get<int>() != kCheckpointVersion) {
    fail(ErrorCode::VersionMismatch, "checkpoint version " + std::to_string(version->get<int>()) +
                                         ", expected " + std::to_string(kCheckpointVersion));
  }

  RankModel model;
  try {
    model.pooling = parse_pooling(doc.value("pooling", std::string()));
  } catch (const Error&) {
    malformed("bad pooling mode");
  }
  if (doc.value("node_features", 0) != static_cast<int>(kNodeFeatures)) {
    malformed("node feature count does not match this build");
  }

  const auto scaler = doc.find("scaler");
  if (scaler == doc.end() || !scaler->is_object()) malformed("missing scaler");
  const auto mins = doubles(*scaler, "node_min", kNodeFeatures);
  const auto maxs = doubles(*scaler, "node_max", kNodeFeatures);
  std::copy(mins.begin(), mins.end(), model.scaler.node_min.begin());
  std::copy(maxs.begin(), maxs.end(), model.scaler.node_max.begin());
  model.scaler.edge_min = scalar(*scaler, "edge_min");
  model.scaler.edge_max = scalar(*scaler, "edge_max");
  for (std::size_t f = 0; f < kNodeFeatures; ++f) {
    if (model.scaler.node_max[f] < model.scaler.node_min[f]) malformed("scaler max < min");
  }

  const auto layers = doc.find("layers");
  if (layers == doc.end() || !layers->is_array() || layers->size() != kLayers) {
    malformed("expected " + std::to_string(kLayers) + " layers");
  }
  for (std::size_t l = 0; l < kLayers; ++l) {
    const LayerShape& s = layer_shapes()[l];
    const json& layer = (*layers)[l];
    if (!layer.is_object() || layer.value("in", std::size_t{0}) != s.in ||
        layer.value("out", std::size_t{0}) != s.out ||
        layer.value("kind", std::string()) != (s.graph ? "sage" : "dense")) {
      malformed("layer " + std::to_string(l) + " shape does not match this build");
    }
    const auto w = doubles(layer, "weight", s.out * s.fan_in);
    const auto b = doubles(layer, "bias", s.out);
    std::copy(w.begin(), w.end(), model.weights(l).begin());
    std::copy(b.begin(), b.end(), model.bias(l).begin());
  }

  if (const auto meta = doc.find("meta"); meta != doc.end() && meta->is_object()) {
    model.meta.seed = meta->value("seed", std::uint64_t{0});
    model.meta.iterations = meta->value("iterations", 0);
    if (const auto h = meta->find("loss_history"); h != meta->end() && h->is_array()) {
      model.meta.loss_history = doubles(*meta, "loss_history", h->size());
    }
  }
  return model;
}

}  // namespace

RankModel model_from_json(std::string_view text) {
  try {
    return parse_checkpoint(text);
  } catch (const json::exception& e) {
    malformed(e.what());
  }
}

void save_model(const RankModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << model_to_json(model);
  if (!out) fail(ErrorCode::IoError, "write failed: " + path.string());
}

RankModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace chipletrank

#include "medrl/weights_io.hpp"

#include <fstream>

#include "medrl/error.hpp"

namespace medrl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json header(std::string_view kind, std::uint64_t seed, const ordered_json& config) {
  ordered_json j;
  j["format"] = "medrl-weights";
  j["version"] = kWeightsVersion;
  j["kind"] = std::string(kind);
  j["seed"] = seed;
  j["config"] = config;
  return j;
}

void check_header(const json& doc, std::string_view kind) {
  if (!doc.is_object() || doc.value("format", "") != "medrl-weights") {
    throw Error("weights: not a medrl-weights document");
  }
  if (doc.value("version", 0) != kWeightsVersion) throw Error("weights: unsupported version");
  if (doc.value("kind", "") != kind) {
    throw Error("weights: expected kind \"" + std::string(kind) + "\"");
  }
}

ordered_json layer(std::string_view name, std::string_view activation, std::size_t rows,
                   std::size_t cols, std::span<const double> w, std::span<const double> b) {
  return {{"name", std::string(name)},
          {"activation", std::string(activation)},
          {"shape", {rows, cols}},
          {"weights", std::vector<double>(w.begin(), w.end())},
          {"bias", std::vector<double>(b.begin(), b.end())}};
}

ordered_json mlp_layers(const Mlp& net) {
  return ordered_json::array(
      {layer("hidden", "tanh", net.hidden_size(), net.input_size(), net.w1(), net.b1()),
       layer("output", "linear", net.output_size(), net.hidden_size(), net.w2(), net.b2())});
}

void copy_checked(const json& src, std::span<double> dst, const char* what) {
  if (!src.is_array() || src.size() != dst.size()) {
    throw Error(std::string("weights: ") + what + " has the wrong length");
  }
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i].get<double>();
}

Mlp mlp_from_layers(const json& layers) {
  if (!layers.is_array() || layers.size() != 2) throw Error("weights: expected two layers");
  const auto shape = [](const json& l) {
    return std::pair{l.at("shape").at(0).get<std::size_t>(), l.at("shape").at(1).get<std::size_t>()};
  };
  auto [hidden, in] = shape(layers[0]);
  auto [out, hidden2] = shape(layers[1]);
  if (hidden != hidden2) throw Error("weights: layer shapes do not chain");
  Mlp net(in, hidden, out);
  copy_checked(layers[0].at("weights"), net.w1(), "hidden weights");
  copy_checked(layers[0].at("bias"), net.b1(), "hidden bias");
  copy_checked(layers[1].at("weights"), net.w2(), "output weights");
  copy_checked(layers[1].at("bias"), net.b2(), "output bias");
  return net;
}

void check_period(const json& doc, GrowingPeriod expected) {
  if (doc.value("period", "") != period_name(expected)) {
    throw Error("weights: expected period " + std::string(period_name(expected)));
  }
}

std::vector<double> doubles(const json& j, const char* what) {
  if (!j.is_array()) throw Error(std::string("weights: ") + what + " must be an array");
  return j.get<std::vector<double>>();
}

}  // namespace

ordered_json growth_model_to_json(const GrowthModel& model, GrowingPeriod period,
                                  std::uint64_t seed, const ordered_json& config) {
  ordered_json j = header("growth-model", seed, config);
  j["period"] = std::string(period_name(period));
  j["window"] = model.window;
  j["layers"] = mlp_layers(model.net);
  j["normalization"] = {{"input_mean", model.input_norm.mean},
                        {"input_scale", model.input_norm.scale},
                        {"target_mean", model.target_norm.mean},
                        {"target_scale", model.target_norm.scale},
                        {"pinned", model.pinned}};
  return j;
}

GrowthModel growth_model_from_json(const json& doc, GrowingPeriod expected_period) {
  try {
    check_header(doc, "growth-model");
    check_period(doc, expected_period);
    GrowthModel m;
    m.window = doc.at("window").get<std::size_t>();
    m.net = mlp_from_layers(doc.at("layers"));
    if (m.net.input_size() != 4 * m.window + 4 || m.net.output_size() != Morphology::kSize) {
      throw Error("weights: growth model shape does not match its window");
    }
    const json& n = doc.at("normalization");
    m.input_norm.mean = doubles(n.at("input_mean"), "input_mean");
    m.input_norm.scale = doubles(n.at("input_scale"), "input_scale");
    m.target_norm.mean = doubles(n.at("target_mean"), "target_mean");
    m.target_norm.scale = doubles(n.at("target_scale"), "target_scale");
    if (m.input_norm.mean.size() != m.net.input_size() ||
        m.input_norm.scale.size() != m.net.input_size() ||
        m.target_norm.mean.size() != Morphology::kSize ||
        m.target_norm.scale.size() != Morphology::kSize) {
      throw Error("weights: normalization has the wrong length");
    }
    m.pinned = n.at("pinned").get<std::array<bool, Morphology::kSize>>();
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("weights: malformed growth model: ") + e.what());
  }
}

ordered_json qnet_to_json(const Mlp& online, GrowingPeriod period, std::uint64_t seed,
                          const ordered_json& config) {
  ordered_json j = header("q-network", seed, config);
  j["period"] = std::string(period_name(period));
  j["actions"] = online.output_size();
  j["layers"] = mlp_layers(online);
  return j;
}

Mlp qnet_from_json(const json& doc, GrowingPeriod expected_period) {
  try {
    check_header(doc, "q-network");
    check_period(doc, expected_period);
    Mlp net = mlp_from_layers(doc.at("layers"));
    if (net.input_size() != kObservationSize ||
        net.output_size() != doc.at("actions").get<std::size_t>()) {
      throw Error("weights: q-network shape mismatch");
    }
    return net;
  } catch (const json::exception& e) {
    throw Error(std::string("weights: malformed q-network: ") + e.what());
  }
}

ordered_json classifier_to_json(const BinaryClassifier& clf, std::string_view role,
                                const GateThresholds& thresholds, std::uint64_t seed,
                                const ordered_json& config) {
  ordered_json j = header("classifier", seed, config);
  j["role"] = std::string(role);
  j["features"] = {"stem_length_cm", "leaf_count", "leaf_area_cm2", "flower_volume_cm3",
                   "time_in_run_s"};
  const double bias[] = {clf.bias};
  j["layers"] = ordered_json::array(
      {layer("logistic", "sigmoid", 1, clf.weights.size(), clf.weights, bias)});
  j["thresholds"] = {{"delta1_cm", thresholds.delta1_cm}, {"delta2_cm", thresholds.delta2_cm}};
  return j;
}

BinaryClassifier classifier_from_json(const json& doc, std::string_view expected_role,
                                      GateThresholds* thresholds) {
  try {
    check_header(doc, "classifier");
    if (doc.value("role", "") != expected_role) {
      throw Error("weights: expected classifier role " + std::string(expected_role));
    }
    const json& layers = doc.at("layers");
    if (!layers.is_array() || layers.size() != 1) throw Error("weights: expected one layer");
    BinaryClassifier clf;
    copy_checked(layers[0].at("weights"), clf.weights, "classifier weights");
    const std::vector<double> b = doubles(layers[0].at("bias"), "bias");
    if (b.size() != 1) throw Error("weights: classifier bias must have one entry");
    clf.bias = b[0];
    if (thresholds) {
      thresholds->delta1_cm = doc.at("thresholds").at("delta1_cm").get<double>();
      thresholds->delta2_cm = doc.at("thresholds").at("delta2_cm").get<double>();
    }
    return clf;
  } catch (const json::exception& e) {
    throw Error(std::string("weights: malformed classifier: ") + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const ordered_json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact("missing artifact " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace medrl

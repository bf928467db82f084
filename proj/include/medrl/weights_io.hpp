#pragma once

#include <cstdint>
#include <filesystem>

#include "json.hpp"
#include "medrl/agent.hpp"
#include "medrl/growth_model.hpp"
#include "medrl/stage_gate.hpp"

namespace medrl {

// Every persisted model is one JSON document:
//   {"format":"medrl-weights","version":1,"kind":...,"seed":...,"config":{...},
//    "layers":[{"name","activation","shape":[rows,cols],"weights":[row-major],"bias":[...]}],
//    ...kind-specific fields}
// Serialization is byte-deterministic for identical models.

inline constexpr int kWeightsVersion = 1;

nlohmann::ordered_json growth_model_to_json(const GrowthModel& model, GrowingPeriod period,
                                            std::uint64_t seed,
                                            const nlohmann::ordered_json& config);
GrowthModel growth_model_from_json(const nlohmann::json& doc, GrowingPeriod expected_period);

nlohmann::ordered_json qnet_to_json(const Mlp& online, GrowingPeriod period, std::uint64_t seed,
                                    const nlohmann::ordered_json& config);
Mlp qnet_from_json(const nlohmann::json& doc, GrowingPeriod expected_period);

/// `role` is "stage" or "sex".
nlohmann::ordered_json classifier_to_json(const BinaryClassifier& clf, std::string_view role,
                                          const GateThresholds& thresholds, std::uint64_t seed,
                                          const nlohmann::ordered_json& config);
BinaryClassifier classifier_from_json(const nlohmann::json& doc, std::string_view expected_role,
                                      GateThresholds* thresholds = nullptr);

void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& doc);
/// Throws MissingArtifact if the file does not exist, Error if it is not JSON.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace medrl

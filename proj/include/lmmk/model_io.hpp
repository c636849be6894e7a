#pragma once

#include <string>

#include <json.hpp>

#include "lmmk/learner.hpp"

namespace lmmk {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document: beta, zero tolerance, kernel names, labels,
/// hyperparameters and the per-round objective trace. Doubles are written
/// in shortest round-trip form, so parse(dump(m)) reproduces m bit for bit.
nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& doc);

nlohmann::json hyperparams_to_json(const Hyperparams& hp);
Hyperparams hyperparams_from_json(const nlohmann::json& doc, Hyperparams defaults = {});

}  // namespace lmmk

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmmk/classify.hpp"
#include "lmmk/pipeline/experiment.hpp"

namespace lmmk::pipeline {

nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const SweepReport& report);
nlohmann::json to_json(const TuneReport& report);
/// Labels are written as class names.
nlohmann::json to_json(const PredictionReport& report, const std::vector<std::string>& class_names);

nlohmann::json recipe_to_json(const KernelRecipe& recipe);
KernelRecipe recipe_from_json(const nlohmann::json& doc);

/// Model plus the kernel recipe and class names needed to predict.
struct ModelBundle {
  TrainedModel model;
  KernelRecipe recipe;
  std::vector<std::string> class_names;
};

nlohmann::json bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const nlohmann::json& doc);

/// One row per grid point: value, status, accuracies, sparsity, sum beta.
void write_sweep_csv(const std::filesystem::path& path, const SweepReport& report);

nlohmann::json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; "-" writes to stdout.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace lmmk::pipeline

#pragma once

#include <filesystem>

#include <json.hpp>

#include "lmmk/pipeline/dataset.hpp"
#include "lmmk/pipeline/experiment.hpp"

namespace lmmk::pipeline {

/// Everything a command can be configured with. Command-line flags
/// override values loaded from a JSON config file.
struct CliConfig {
  IngestSpec input;
  RunConfig run;
  SweepSpec sweep;
  TuneSpec tune;
  std::filesystem::path output = "-";
};

/// Keys (all optional):
///   input:       { features, labels, matrices: [..], kind, kernel_mode }
///   hyperparams: { k, mu, lambda, outer_iters, constraint_form }
///   split:       { train_fraction, reps, seed }
///   k_classify, record_timings, output
///   sweep:       { param, values: [..] }
///   tune:        { k: [..], mu: [..], lambda: [..], folds }
///   lp:          { max_iters }
/// Relative paths resolve against `base_dir`. Unknown keys are rejected.
CliConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
CliConfig load_config(const std::filesystem::path& path);

}  // namespace lmmk::pipeline

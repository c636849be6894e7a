// lmmk: command-line driver for kernel building, training, prediction,
// evaluation, sweeps and tuning. Every command writes one JSON document to
// --out (stdout by default); logs go to stderr.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lmmk/classify.hpp"
#include "lmmk/error.hpp"
#include "lmmk/model_io.hpp"
#include "lmmk/parallel.hpp"
#include "lmmk/pipeline/config.hpp"
#include "lmmk/pipeline/dataset.hpp"
#include "lmmk/pipeline/experiment.hpp"
#include "lmmk/pipeline/kernel_builder.hpp"
#include "lmmk/pipeline/reports.hpp"
#include "lmmk/pipeline/split.hpp"

namespace fs = std::filesystem;
using namespace lmmk;
using namespace lmmk::pipeline;

namespace {

enum Exit { kOk = 0, kConfigError = 2, kDataError = 3, kSolverError = 4 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
      return kConfigError;
    case ErrorCode::LPNotOptimal:
    case ErrorCode::EmptyTripleSet:
      return kSolverError;
    default:
      return kDataError;
  }
}

// Flags shared by the commands; unset flags leave config values alone.
struct Overrides {
  std::string config;
  std::optional<std::string> features, labels, kind, kernel_mode, constraint_form, out;
  std::vector<std::string> matrices;
  std::optional<int> k, outer_iters, reps, k_classify;
  std::optional<double> mu, lambda, train_fraction;
  std::optional<std::uint64_t> seed;
  bool timings = false;
};

void add_data_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--features", o.features, "Headered CSV of raw features");
  cmd->add_option("--labels", o.labels, "Headered CSV of labels");
  cmd->add_option("--matrix", o.matrices, "Precomputed N x N kernel or distance matrix (repeatable)");
  cmd->add_option("--kind", o.kind, "Precomputed matrix kind: kernel or distance");
  cmd->add_option("--kernel-mode", o.kernel_mode, "per-feature, per-representation or precomputed");
}

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--out", o.out, "Output JSON path ('-' for stdout)");
}

void add_run_flags(CLI::App* cmd, Overrides& o) {
  add_data_flags(cmd, o);
  cmd->add_option("--k", o.k, "Targets and impostors per anchor");
  cmd->add_option("--mu", o.mu, "Pull/push trade-off in [0, 1]");
  cmd->add_option("--lambda", o.lambda, "L1 weight on beta");
  cmd->add_option("--outer-iters", o.outer_iters, "Neighbor refresh rounds");
  cmd->add_option("--constraint-form", o.constraint_form, "derived or paper-literal");
  cmd->add_option("--train-fraction", o.train_fraction, "Training share of each class");
  cmd->add_option("--reps", o.reps, "Random split repetitions");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--k-classify", o.k_classify, "Neighbors at prediction time (default: k)");
  cmd->add_flag("--timings", o.timings, "Record per-stage wall-clock timings");
}

CliConfig resolve(const Overrides& o) {
  CliConfig cfg = o.config.empty() ? CliConfig{} : load_config(o.config);
  if (o.features) cfg.input.features = *o.features;
  if (o.labels) cfg.input.labels = *o.labels;
  if (!o.matrices.empty()) cfg.input.matrices.assign(o.matrices.begin(), o.matrices.end());
  if (o.kind) cfg.input.kind = parse_precomputed_kind(*o.kind);
  if (o.kernel_mode) cfg.input.mode = parse_kernel_mode(*o.kernel_mode);
  if (!o.matrices.empty() && !o.kernel_mode) cfg.input.mode = KernelMode::Precomputed;
  if (o.k) cfg.run.hp.k = *o.k;
  if (o.mu) cfg.run.hp.mu = *o.mu;
  if (o.lambda) cfg.run.hp.lambda = *o.lambda;
  if (o.outer_iters) cfg.run.hp.outer_iters = *o.outer_iters;
  if (o.constraint_form) cfg.run.hp.constraint_form = parse_constraint_form(*o.constraint_form);
  if (o.train_fraction) cfg.run.split.train_fraction = *o.train_fraction;
  if (o.reps) cfg.run.split.reps = *o.reps;
  if (o.seed) cfg.run.split.seed = *o.seed;
  if (o.k_classify) cfg.run.k_classify = *o.k_classify;
  if (o.timings) cfg.run.record_timings = true;
  if (o.out) cfg.output = *o.out;
  cfg.run.hp.validate();
  cfg.run.split.validate();
  return cfg;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "'" + item + "' is not a number");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_list(text)) {
    if (v != static_cast<int>(v)) throw Error(ErrorCode::ConfigError, "expected integers in '" + text + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// build-kernels: base kernels over all samples, one matrix file each.
int cmd_build_kernels(const CliConfig& cfg, const fs::path& dir, const std::string& format) {
  const Dataset data = ingest(cfg.input);
  std::vector<Index> all(static_cast<std::size_t>(data.n_samples()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Index>(i);
  const SplitKernels sk = build_kernels(data, all);
  fs::create_directories(dir);
  nlohmann::json files = nlohmann::json::array();
  for (Index m = 0; m < sk.train.n_kernels(); ++m) {
    const fs::path file = dir / ("kernel_" + std::to_string(m) + (format == "csv" ? ".csv" : ".bin"));
    if (format == "csv")
      write_matrix_csv(file, sk.train.kernel(m));
    else
      write_matrix_binary(file, sk.train.kernel(m));
    files.push_back(file.string());
  }
  const auto& r = sk.recipe;
  write_json(cfg.output, {{"n_samples", data.n_samples()},
                          {"mode", std::string(to_string(r.mode))},
                          {"names", r.names},
                          {"bandwidths", r.bandwidths},
                          {"degenerate", r.degenerate},
                          {"files", files}});
  return kOk;
}

int cmd_train(const CliConfig& cfg, const std::optional<std::string>& model_out, bool keep_model) {
  const Dataset data = ingest(cfg.input);
  TrainOutcome outcome = run_train(data, cfg.run);
  nlohmann::json doc = {{"report", to_json(outcome.report)}};
  if (keep_model) {
    const ModelBundle bundle{outcome.model, outcome.recipe, data.labels.class_names};
    if (model_out)
      write_json(*model_out, bundle_to_json(bundle));
    else
      doc["model"] = bundle_to_json(bundle);
  }
  write_json(cfg.output, doc);
  return kOk;
}

struct PredictArgs {
  std::string model;
  std::vector<std::string> cross;
  std::optional<std::string> self;
  bool neighbors = false;
};

int cmd_predict(const CliConfig& cfg, const Overrides& o, const PredictArgs& args) {
  const ModelBundle bundle = bundle_from_json(read_json(args.model));
  std::optional<CrossKernelSet> cross;
  std::optional<KernelSet> train_ks;
  if (bundle.recipe.mode == KernelMode::Precomputed) {
    if (args.cross.empty()) throw Error(ErrorCode::ConfigError, "precomputed models need --cross matrices");
    const Dataset original = read_precomputed(cfg.input.matrices, bundle.recipe.kind);
    train_ks.emplace(train_kernels_from_recipe(bundle.recipe, &original));
    std::vector<Matrix> mats;
    for (const auto& p : args.cross) mats.push_back(read_matrix(p));
    std::vector<Vector> self;
    if (args.self) {
      const Matrix s = read_matrix(*args.self);
      for (Index m = 0; m < s.cols(); ++m) self.push_back(s.col(m));
    }
    cross.emplace(cross_from_matrices(bundle.recipe, mats, self));
  } else {
    if (cfg.input.features.empty()) throw Error(ErrorCode::ConfigError, "--features is required");
    train_ks.emplace(train_kernels_from_recipe(bundle.recipe));
    cross.emplace(cross_from_features(bundle.recipe, read_numeric_csv(cfg.input.features)));
  }

  std::optional<Labels> truth;
  if (!cfg.input.labels.empty()) {
    const CsvTable table = read_csv(cfg.input.labels);
    std::size_t column = 0;
    for (std::size_t c = 0; c < table.header.size(); ++c)
      if (table.header[c] == "label") column = c;
    std::vector<std::string> names;
    for (const auto& row : table.rows) names.push_back(row[column]);
    truth = map_labels(names, bundle.class_names);
  }
  PredictOptions opts{o.k_classify.value_or(cfg.run.k_classify), args.neighbors};
  const PredictionReport report =
      truth ? knn_predict(bundle.model, *cross, *train_ks, opts, std::span<const Label>(*truth))
            : knn_predict(bundle.model, *cross, *train_ks, opts);
  write_json(cfg.output, to_json(report, bundle.class_names));
  return kOk;
}

int cmd_sweep(CliConfig cfg, const std::optional<std::string>& param, const std::optional<std::string>& values,
              const std::optional<std::string>& csv) {
  if (param) cfg.sweep.param = parse_sweep_param(*param);
  if (values) cfg.sweep.values = parse_list(*values);
  const Dataset data = ingest(cfg.input);
  const SweepReport report = run_sweep(data, cfg.run, cfg.sweep);
  if (csv) write_sweep_csv(*csv, report);
  write_json(cfg.output, to_json(report));
  bool any_ok = false;
  for (const auto& p : report.points) any_ok = any_ok || p.report.has_value();
  return any_ok ? kOk : exit_code(*report.points.front().error_code);
}

int cmd_tune(CliConfig cfg, const std::optional<std::string>& ks, const std::optional<std::string>& mus,
             const std::optional<std::string>& lambdas, const std::optional<int>& folds) {
  if (ks) cfg.tune.ks = parse_int_list(*ks);
  if (mus) cfg.tune.mus = parse_list(*mus);
  if (lambdas) cfg.tune.lambdas = parse_list(*lambdas);
  if (folds) cfg.tune.folds = *folds;
  const Dataset data = ingest(cfg.input);
  const TuneReport report = tune(data, first_training_split(data, cfg.run.split), cfg.run, cfg.tune);
  write_json(cfg.output, to_json(report));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("lmmk"));
  spdlog::set_level(spdlog::level::warn);
  parallel::configure_from_env();

  CLI::App app{"Large-margin multiple kernel learning"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  Overrides o;

  auto* build = app.add_subcommand("build-kernels", "Build normalized base kernels over all samples");
  add_common_flags(build, o);
  add_data_flags(build, o);
  std::string kernel_dir = "kernels";
  std::string kernel_format = "bin";
  build->add_option("--dir", kernel_dir, "Directory for the kernel matrices");
  build->add_option("--format", kernel_format, "bin or csv")->check(CLI::IsMember({"bin", "csv"}));

  auto* train_cmd = app.add_subcommand("train", "Train on repeated splits and save the first model");
  add_common_flags(train_cmd, o);
  add_run_flags(train_cmd, o);
  std::optional<std::string> model_out;
  train_cmd->add_option("--model-out", model_out, "Write the model bundle here instead of into the report");

  auto* predict = app.add_subcommand("predict", "Classify new samples with a saved model");
  add_common_flags(predict, o);
  add_data_flags(predict, o);
  predict->add_option("--k-classify", o.k_classify, "Neighbors at prediction time (default: model k)");
  PredictArgs pargs;
  predict->add_option("--model", pargs.model, "Model bundle from 'train'")->required();
  predict->add_option("--cross", pargs.cross, "Query-vs-train matrix per base kernel (precomputed models)");
  predict->add_option("--self", pargs.self, "Raw K_m(z, z) per query, one column per kernel");
  predict->add_flag("--neighbors", pargs.neighbors, "Include nearest training indices and distances");

  auto* evaluate = app.add_subcommand("evaluate", "Accuracy of learned weights vs kNN-ave over repeated splits");
  add_common_flags(evaluate, o);
  add_run_flags(evaluate, o);

  auto* sweep = app.add_subcommand("sweep", "Evaluate over a grid of one hyperparameter");
  add_common_flags(sweep, o);
  add_run_flags(sweep, o);
  std::optional<std::string> sweep_param, sweep_values, sweep_csv;
  sweep->add_option("--param", sweep_param, "lambda, mu, k, k_classify or outer_iters");
  sweep->add_option("--values", sweep_values, "Comma-separated grid");
  sweep->add_option("--csv", sweep_csv, "Also write a CSV for plotting");

  auto* tune_cmd = app.add_subcommand("tune", "Grid cross-validation on the training split");
  add_common_flags(tune_cmd, o);
  add_run_flags(tune_cmd, o);
  std::optional<std::string> k_grid, mu_grid, lambda_grid;
  std::optional<int> folds;
  tune_cmd->add_option("--k-grid", k_grid, "Comma-separated k values");
  tune_cmd->add_option("--mu-grid", mu_grid, "Comma-separated mu values");
  tune_cmd->add_option("--lambda-grid", lambda_grid, "Comma-separated lambda values");
  tune_cmd->add_option("--folds", folds, "Cross-validation folds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (verbose) spdlog::set_level(spdlog::level::info);

  try {
    const CliConfig cfg = resolve(o);
    if (*build) return cmd_build_kernels(cfg, kernel_dir, kernel_format);
    if (*train_cmd) return cmd_train(cfg, model_out, true);
    if (*predict) return cmd_predict(cfg, o, pargs);
    if (*evaluate) return cmd_train(cfg, std::nullopt, false);
    if (*sweep) return cmd_sweep(cfg, sweep_param, sweep_values, sweep_csv);
    if (*tune_cmd) return cmd_tune(cfg, k_grid, mu_grid, lambda_grid, folds);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kDataError;
  }
  return kOk;
}

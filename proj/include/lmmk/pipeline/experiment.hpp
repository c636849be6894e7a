#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lmmk/error.hpp"
#include "lmmk/learner.hpp"
#include "lmmk/lp.hpp"
#include "lmmk/pipeline/dataset.hpp"
#include "lmmk/pipeline/kernel_builder.hpp"

namespace lmmk::pipeline {

struct SplitSpec {
  double train_fraction = 0.5;
  int reps = 10;
  std::uint64_t seed = 42;

  void validate() const;
};

struct RunConfig {
  Hyperparams hp;
  SplitSpec split;
  int k_classify = 0;  // 0: use hp.k
  lp::Options lp;
  /// Wall-clock stage timings make reports differ between runs, so they are
  /// only serialized on request.
  bool record_timings = false;

  int classify_k() const noexcept { return k_classify > 0 ? k_classify : hp.k; }
};

struct StageTimings {
  double kernels = 0.0;  // seconds
  double train = 0.0;
  double predict = 0.0;
};

struct RepetitionResult {
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double accuracy = 0.0;
  double baseline_accuracy = 0.0;  // kNN-ave on the same split
  Index sparsity = 0;
  double sum_beta = 0.0;
  std::vector<double> beta;
  bool uniform_fallback = false;
  std::vector<RoundRecord> trace;
  std::size_t best_round = 0;
  StageTimings timings;
};

struct EvalReport {
  Hyperparams hp;
  int k_classify = 0;
  SplitSpec split;
  std::vector<std::string> kernel_names;
  std::vector<std::string> class_names;
  std::vector<RepetitionResult> reps;
  bool timings_recorded = false;

  // Aggregates, recomputable from `reps`. Standard deviations use n - 1.
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_baseline_accuracy = 0.0;
  double std_baseline_accuracy = 0.0;
  double mean_sparsity = 0.0;
  double mean_sum_beta = 0.0;
  std::vector<double> mean_beta;
  std::size_t learned_wins = 0;  // repetitions where learned beta beats kNN-ave
  bool any_fallback = false;

  void summarize();
};

struct TrainOutcome {
  EvalReport report;
  /// Model and kernel recipe of the first repetition.
  TrainedModel model;
  KernelRecipe recipe;
};

/// Per repetition: seeded stratified split, kernels on the training part,
/// train, then learned-beta and kNN-ave prediction on the held-out part.
TrainOutcome run_train(const Dataset& data, const RunConfig& config);

enum class SweepParam { Lambda, Mu, K, KClassify, OuterIters };

std::string_view to_string(SweepParam p);
SweepParam parse_sweep_param(std::string_view text);

struct SweepSpec {
  SweepParam param = SweepParam::Lambda;
  std::vector<double> values;

  void validate() const;
};

struct SweepPoint {
  double value = 0.0;
  std::optional<EvalReport> report;
  std::optional<ErrorCode> error_code;
  std::string error;
};

struct SweepReport {
  SweepSpec spec;
  RunConfig base;
  std::vector<SweepPoint> points;
};

/// Applies one grid value to a copy of `config`.
RunConfig with_value(RunConfig config, SweepParam param, double value);

/// One run_train per grid value, all with the same seeds. A failing grid
/// point is recorded and the sweep continues.
SweepReport run_sweep(const Dataset& data, const RunConfig& config, const SweepSpec& sweep);

struct TuneSpec {
  std::vector<int> ks{1, 2, 3, 4, 5};
  std::vector<double> mus{0.5, 0.6, 0.7};
  std::vector<double> lambdas{0.0, 0.01, 0.05, 0.1, 0.5, 1.0, 2.0};
  int folds = 3;

  void validate() const;
};

struct TuneCandidate {
  Hyperparams hp;
  double cv_accuracy = 0.0;
  double cv_sparsity = 0.0;
  std::string error;
};

struct TuneReport {
  TuneSpec spec;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::vector<TuneCandidate> stage_k_mu;
  std::vector<TuneCandidate> stage_lambda;
  Hyperparams selected;
};

/// Grid cross-validation on the given training samples only: (k, mu) first
/// with the configured lambda, then lambda with the chosen (k, mu).
/// Accuracy ties keep the earlier (k, mu) and the larger lambda.
TuneReport tune(const Dataset& data, const std::vector<Index>& train, const RunConfig& config,
                const TuneSpec& spec);

/// Training part of the first repetition's split, the sample set `tune`
/// works on from the command line.
std::vector<Index> first_training_split(const Dataset& data, const SplitSpec& split);

/// Sub-dataset restricted to the given samples (raw or precomputed).
Dataset subset(const Dataset& data, const std::vector<Index>& idx);

}  // namespace lmmk::pipeline

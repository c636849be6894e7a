#include "lmmk/pipeline/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "lmmk/classify.hpp"
#include "lmmk/pipeline/split.hpp"

namespace lmmk::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context) {
  throw Error(e.code(), context + ": " + e.detail());
}

}  // namespace

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorCode::ConfigError, "train_fraction must lie in (0, 1)");
  if (reps < 1) throw Error(ErrorCode::ConfigError, "reps must be >= 1");
}

void EvalReport::summarize() {
  std::vector<double> acc, base, sp, sb;
  for (const auto& r : reps) {
    acc.push_back(r.accuracy);
    base.push_back(r.baseline_accuracy);
    sp.push_back(static_cast<double>(r.sparsity));
    sb.push_back(r.sum_beta);
  }
  mean_accuracy = mean(acc);
  std_accuracy = sample_std(acc);
  mean_baseline_accuracy = mean(base);
  std_baseline_accuracy = sample_std(base);
  mean_sparsity = mean(sp);
  mean_sum_beta = mean(sb);
  mean_beta.assign(kernel_names.size(), 0.0);
  learned_wins = 0;
  any_fallback = false;
  for (const auto& r : reps) {
    for (std::size_t m = 0; m < r.beta.size() && m < mean_beta.size(); ++m) mean_beta[m] += r.beta[m];
    learned_wins += r.accuracy > r.baseline_accuracy ? 1 : 0;
    any_fallback = any_fallback || r.uniform_fallback;
  }
  if (!reps.empty())
    for (double& b : mean_beta) b /= static_cast<double>(reps.size());
}

TrainOutcome run_train(const Dataset& data, const RunConfig& config) {
  config.hp.validate();
  config.split.validate();
  if (config.k_classify < 0) throw Error(ErrorCode::ConfigError, "k_classify must be >= 0");

  TrainOutcome out;
  EvalReport& report = out.report;
  report.hp = config.hp;
  report.k_classify = config.classify_k();
  report.split = config.split;
  report.kernel_names = data.kernel_names();
  report.class_names = data.labels.class_names;
  report.timings_recorded = config.record_timings;

  const Labels& labels = data.labels.ids;
  for (int r = 0; r < config.split.reps; ++r) {
    RepetitionResult rep;
    rep.seed = repetition_seed(config.split.seed, static_cast<std::size_t>(r));
    try {
      const Split split = stratified_split(labels, config.split.train_fraction, rep.seed);
      if (split.test.empty()) throw Error(ErrorCode::InvalidArgument, "split left no test samples");
      rep.n_train = split.train.size();
      rep.n_test = split.test.size();
      const Labels truth = take(labels, split.test);

      auto start = Clock::now();
      SplitKernels sk = build_kernels(data, split.train, split.test);
      rep.timings.kernels = seconds_since(start);

      start = Clock::now();
      TrainedModel model = train(sk.train, take(labels, split.train), config.hp, config.lp);
      rep.timings.train = seconds_since(start);

      start = Clock::now();
      const PredictionReport learned =
          knn_predict(model, *sk.test, sk.train, PredictOptions{config.k_classify, false}, std::span<const Label>(truth));
      const PredictionReport baseline =
          knn_predict_with(uniform_weights(sk.train.n_kernels()), model.labels, *sk.test, sk.train,
                           config.classify_k(), false, std::span<const Label>(truth));
      rep.timings.predict = seconds_since(start);

      rep.accuracy = *learned.accuracy;
      rep.baseline_accuracy = *baseline.accuracy;
      rep.sparsity = sparsity(model.weights);
      rep.sum_beta = model.weights.sum();
      rep.beta.assign(model.weights.beta().begin(), model.weights.beta().end());
      rep.uniform_fallback = learned.used_uniform_fallback;
      rep.trace = model.objective_trace;
      rep.best_round = model.best_round;
      spdlog::info("repetition {}: accuracy {:.4f} (kNN-ave {:.4f}), |beta|_0 = {}", r + 1, rep.accuracy,
                   rep.baseline_accuracy, rep.sparsity);

      if (r == 0) {
        out.model = std::move(model);
        out.recipe = std::move(sk.recipe);
      }
    } catch (const Error& e) {
      rethrow_with_context(e, "repetition " + std::to_string(r + 1));
    }
    report.reps.push_back(std::move(rep));
  }
  report.summarize();
  return out;
}

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Lambda: return "lambda";
    case SweepParam::Mu: return "mu";
    case SweepParam::K: return "k";
    case SweepParam::KClassify: return "k_classify";
    case SweepParam::OuterIters: return "outer_iters";
  }
  return "unknown";
}

SweepParam parse_sweep_param(std::string_view text) {
  if (text == "lambda") return SweepParam::Lambda;
  if (text == "mu") return SweepParam::Mu;
  if (text == "k") return SweepParam::K;
  if (text == "k_classify" || text == "k-classify") return SweepParam::KClassify;
  if (text == "outer_iters" || text == "outer-iters") return SweepParam::OuterIters;
  throw Error(ErrorCode::ConfigError,
              "unknown sweep parameter '" + std::string(text) + "' (lambda, mu, k, k_classify, outer_iters)");
}

void SweepSpec::validate() const {
  if (values.empty()) throw Error(ErrorCode::ConfigError, "sweep grid is empty");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorCode::ConfigError, "sweep values must be finite");
}

RunConfig with_value(RunConfig config, SweepParam param, double value) {
  const auto as_int = [&] {
    if (value != std::floor(value)) throw Error(ErrorCode::ConfigError, std::string(to_string(param)) + " must be an integer");
    return static_cast<int>(value);
  };
  switch (param) {
    case SweepParam::Lambda: config.hp.lambda = value; break;
    case SweepParam::Mu: config.hp.mu = value; break;
    case SweepParam::K: config.hp.k = as_int(); break;
    case SweepParam::KClassify: config.k_classify = as_int(); break;
    case SweepParam::OuterIters: config.hp.outer_iters = as_int(); break;
  }
  return config;
}

SweepReport run_sweep(const Dataset& data, const RunConfig& config, const SweepSpec& sweep) {
  sweep.validate();
  SweepReport out{sweep, config, {}};
  for (double value : sweep.values) {
    SweepPoint point;
    point.value = value;
    try {
      point.report = run_train(data, with_value(config, sweep.param, value)).report;
    } catch (const Error& e) {
      spdlog::error("{} = {}: {}", to_string(sweep.param), value, e.what());
      point.error_code = e.code();
      point.error = e.what();
    }
    out.points.push_back(std::move(point));
  }
  return out;
}

void TuneSpec::validate() const {
  if (ks.empty() || mus.empty() || lambdas.empty()) throw Error(ErrorCode::ConfigError, "tune grids must be nonempty");
  if (folds < 2) throw Error(ErrorCode::ConfigError, "tune needs at least 2 folds");
}

Dataset subset(const Dataset& data, const std::vector<Index>& idx) {
  Dataset out;
  out.mode = data.mode;
  out.labels.class_names = data.labels.class_names;
  out.labels.ids = take(data.labels.ids, idx);
  out.kind = data.kind;
  out.matrix_names = data.matrix_names;
  if (data.mode == KernelMode::Precomputed) {
    for (const Matrix& m : data.matrices) out.matrices.push_back(select_block(m, idx, idx));
    for (const Vector& diag : data.raw_diagonals) {
      Vector d(static_cast<Index>(idx.size()));
      for (std::size_t i = 0; i < idx.size(); ++i) d(static_cast<Index>(i)) = diag(idx[i]);
      out.raw_diagonals.push_back(std::move(d));
    }
  } else {
    out.features = select_rows(data.features, idx);
    out.feature_names = data.feature_names;
    out.blocks = data.blocks;
  }
  return out;
}

std::vector<Index> first_training_split(const Dataset& data, const SplitSpec& split) {
  split.validate();
  return stratified_split(data.labels.ids, split.train_fraction, repetition_seed(split.seed, 0)).train;
}

TuneReport tune(const Dataset& data, const std::vector<Index>& train, const RunConfig& config, const TuneSpec& spec) {
  spec.validate();
  config.hp.validate();
  const Dataset pool = subset(data, train);
  TuneReport report;
  report.spec = spec;
  report.seed = repetition_seed(~config.split.seed, 0);
  report.n_train = train.size();

  struct Fold {
    SplitKernels kernels;
    Labels train_labels;
    Labels truth;
  };
  std::vector<Fold> folds;
  for (const Split& s : stratified_folds(pool.labels.ids, spec.folds, report.seed))
    folds.push_back({build_kernels(pool, s.train, s.test), take(pool.labels.ids, s.train), take(pool.labels.ids, s.test)});

  const auto evaluate = [&](const Hyperparams& hp) {
    TuneCandidate c;
    c.hp = hp;
    try {
      hp.validate();
      double acc = 0.0, sp = 0.0;
      for (const Fold& f : folds) {
        const TrainedModel model = lmmk::train(f.kernels.train, f.train_labels, hp, config.lp);
        const PredictionReport pred = knn_predict(model, *f.kernels.test, f.kernels.train,
                                                  PredictOptions{config.k_classify, false}, std::span<const Label>(f.truth));
        acc += *pred.accuracy;
        sp += static_cast<double>(sparsity(model.weights));
      }
      c.cv_accuracy = acc / static_cast<double>(folds.size());
      c.cv_sparsity = sp / static_cast<double>(folds.size());
    } catch (const Error& e) {
      c.cv_accuracy = -std::numeric_limits<double>::infinity();
      c.error = e.what();
      spdlog::warn("tune candidate k={} mu={} lambda={}: {}", hp.k, hp.mu, hp.lambda, e.what());
    }
    return c;
  };

  Hyperparams best = config.hp;
  double best_acc = -std::numeric_limits<double>::infinity();
  for (int k : spec.ks)
    for (double mu : spec.mus) {
      Hyperparams hp = config.hp;
      hp.k = k;
      hp.mu = mu;
      report.stage_k_mu.push_back(evaluate(hp));
      if (report.stage_k_mu.back().cv_accuracy > best_acc) {
        best_acc = report.stage_k_mu.back().cv_accuracy;
        best = hp;
      }
    }
  if (!std::isfinite(best_acc)) throw Error(ErrorCode::LPNotOptimal, "every (k, mu) candidate failed");

  best_acc = -std::numeric_limits<double>::infinity();
  Hyperparams chosen = best;
  for (double lambda : spec.lambdas) {
    Hyperparams hp = best;
    hp.lambda = lambda;
    report.stage_lambda.push_back(evaluate(hp));
    const double acc = report.stage_lambda.back().cv_accuracy;
    if (acc > best_acc || (acc == best_acc && std::isfinite(acc) && lambda > chosen.lambda)) {
      best_acc = acc;
      chosen = hp;
    }
  }
  if (!std::isfinite(best_acc)) throw Error(ErrorCode::LPNotOptimal, "every lambda candidate failed");
  report.selected = chosen;
  return report;
}

}  // namespace lmmk::pipeline

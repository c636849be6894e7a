#include "lmmk/pipeline/reports.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "lmmk/model_io.hpp"

namespace lmmk::pipeline {

using nlohmann::json;

namespace {

json trace_to_json(const std::vector<RoundRecord>& trace) {
  json out = json::array();
  for (const RoundRecord& r : trace)
    out.push_back({{"lp_objective", r.lp_objective},
                   {"objective", r.objective},
                   {"sum_beta", r.sum_beta},
                   {"n_triples", r.n_triples},
                   {"lp_iterations", r.lp_iterations}});
  return out;
}

json split_to_json(const SplitSpec& s) {
  return {{"train_fraction", s.train_fraction}, {"reps", s.reps}, {"seed", s.seed}};
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, Index cols_hint) {
  const auto n = static_cast<Index>(rows.size());
  const Index cols = n > 0 ? static_cast<Index>(rows.at(0).size()) : cols_hint;
  Matrix m(n, cols);
  for (Index i = 0; i < n; ++i) {
    const json& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != cols) throw Error(ErrorCode::ParseError, "ragged matrix in recipe");
    for (Index j = 0; j < cols; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
  }
  return m;
}

json candidate_to_json(const TuneCandidate& c) {
  json out = hyperparams_to_json(c.hp);
  if (c.error.empty()) {
    out["cv_accuracy"] = c.cv_accuracy;
    out["cv_sparsity"] = c.cv_sparsity;
  } else {
    out["cv_accuracy"] = nullptr;
    out["error"] = c.error;
  }
  return out;
}

}  // namespace

json to_json(const EvalReport& report) {
  json reps = json::array();
  for (const RepetitionResult& r : report.reps) {
    json rep = {{"seed", r.seed},
                {"n_train", r.n_train},
                {"n_test", r.n_test},
                {"accuracy", r.accuracy},
                {"baseline_accuracy", r.baseline_accuracy},
                {"sparsity", r.sparsity},
                {"sum_beta", r.sum_beta},
                {"beta", r.beta},
                {"uniform_fallback", r.uniform_fallback},
                {"best_round", r.best_round},
                {"objective_trace", trace_to_json(r.trace)}};
    if (report.timings_recorded)
      rep["timings_seconds"] = {
          {"kernels", r.timings.kernels}, {"train", r.timings.train}, {"predict", r.timings.predict}};
    reps.push_back(std::move(rep));
  }
  json mean_beta = json::object();
  json out = {{"hyperparams", hyperparams_to_json(report.hp)},
              {"k_classify", report.k_classify},
              {"split", split_to_json(report.split)},
              {"kernel_names", report.kernel_names},
              {"class_names", report.class_names},
              {"repetitions", reps},
              {"summary",
               {{"mean_accuracy", report.mean_accuracy},
                {"std_accuracy", report.std_accuracy},
                {"mean_baseline_accuracy", report.mean_baseline_accuracy},
                {"std_baseline_accuracy", report.std_baseline_accuracy},
                {"mean_sparsity", report.mean_sparsity},
                {"mean_sum_beta", report.mean_sum_beta},
                {"mean_beta", report.mean_beta},
                {"learned_wins", report.learned_wins},
                {"uniform_fallback", report.any_fallback}}}};
  if (report.any_fallback)
    out["summary"]["warning"] = "all learned weights were zero in some repetition; lambda is likely too large";
  return out;
}

json to_json(const SweepReport& report) {
  json points = json::array();
  for (const SweepPoint& p : report.points) {
    json point = {{"value", p.value}};
    if (p.report) {
      point["status"] = "ok";
      point["report"] = to_json(*p.report);
    } else {
      point["status"] = "error";
      point["error_code"] = std::string(to_string(*p.error_code));
      point["error"] = p.error;
    }
    points.push_back(std::move(point));
  }
  return {{"param", std::string(to_string(report.spec.param))},
          {"values", report.spec.values},
          {"base_hyperparams", hyperparams_to_json(report.base.hp)},
          {"split", split_to_json(report.base.split)},
          {"points", points}};
}

json to_json(const TuneReport& report) {
  json stage1 = json::array();
  for (const auto& c : report.stage_k_mu) stage1.push_back(candidate_to_json(c));
  json stage2 = json::array();
  for (const auto& c : report.stage_lambda) stage2.push_back(candidate_to_json(c));
  return {{"folds", report.spec.folds},
          {"fold_seed", report.seed},
          {"n_train", report.n_train},
          {"grid", {{"k", report.spec.ks}, {"mu", report.spec.mus}, {"lambda", report.spec.lambdas}}},
          {"stage_k_mu", stage1},
          {"stage_lambda", stage2},
          {"selected", hyperparams_to_json(report.selected)}};
}

json to_json(const PredictionReport& report, const std::vector<std::string>& class_names) {
  const auto name = [&](Label l) {
    return l >= 1 && static_cast<std::size_t>(l) <= class_names.size() ? class_names[static_cast<std::size_t>(l - 1)]
                                                                        : std::to_string(l);
  };
  json predicted = json::array();
  for (Label l : report.predicted) predicted.push_back(name(l));
  json out = {{"predicted", predicted}, {"uniform_fallback", report.used_uniform_fallback}};
  if (report.accuracy) {
    out["accuracy"] = *report.accuracy;
    out["confusion"] = report.confusion;
    out["class_names"] = class_names;
  }
  if (!report.neighbors.empty()) {
    json neighbors = json::array();
    for (const auto& n : report.neighbors) neighbors.push_back({{"indices", n.indices}, {"distances", n.distances}});
    out["neighbors"] = neighbors;
  }
  return out;
}

json recipe_to_json(const KernelRecipe& r) {
  json blocks = json::array();
  for (const Block& b : r.blocks) blocks.push_back({{"name", b.name}, {"columns", b.columns}});
  json diagonals = json::array();
  for (const Vector& d : r.train_diagonals) diagonals.push_back(std::vector<double>(d.data(), d.data() + d.size()));
  json out = {{"mode", std::string(to_string(r.mode))},
              {"names", r.names},
              {"bandwidths", r.bandwidths},
              {"degenerate", r.degenerate},
              {"train_indices", r.train_indices}};
  if (r.mode == KernelMode::Precomputed) {
    out["kind"] = std::string(to_string(r.kind));
    if (r.kind == PrecomputedKind::Kernel) out["train_diagonals"] = diagonals;
  } else {
    out["feature_names"] = r.feature_names;
    out["blocks"] = blocks;
    out["train_features"] = matrix_to_json(r.train_features);
  }
  return out;
}

KernelRecipe recipe_from_json(const json& doc) {
  KernelRecipe r;
  try {
    r.mode = parse_kernel_mode(doc.at("mode").get<std::string>());
    r.names = doc.at("names").get<std::vector<std::string>>();
    r.bandwidths = doc.at("bandwidths").get<std::vector<double>>();
    r.degenerate = doc.at("degenerate").get<std::vector<bool>>();
    r.train_indices = doc.at("train_indices").get<std::vector<Index>>();
    if (r.bandwidths.size() != r.names.size() || r.degenerate.size() != r.names.size())
      throw Error(ErrorCode::ParseError, "recipe arrays disagree on the kernel count");
    if (r.mode == KernelMode::Precomputed) {
      r.kind = parse_precomputed_kind(doc.at("kind").get<std::string>());
      if (r.kind == PrecomputedKind::Kernel)
        for (const auto& d : doc.at("train_diagonals")) {
          const auto v = d.get<std::vector<double>>();
          r.train_diagonals.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
        }
    } else {
      r.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
      for (const auto& b : doc.at("blocks"))
        r.blocks.push_back({b.at("name").get<std::string>(), b.at("columns").get<std::vector<Index>>()});
      r.train_features = matrix_from_json(doc.at("train_features"), static_cast<Index>(r.feature_names.size()));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("kernel recipe: ") + e.what());
  }
  return r;
}

json bundle_to_json(const ModelBundle& b) {
  return {{"format", "lmmk-bundle"},
          {"version", 1},
          {"model", model_to_json(b.model)},
          {"recipe", recipe_to_json(b.recipe)},
          {"class_names", b.class_names}};
}

ModelBundle bundle_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "lmmk-bundle")
      throw Error(ErrorCode::ParseError, "not an lmmk-bundle document");
    if (doc.at("version").get<int>() != 1) throw Error(ErrorCode::ParseError, "unsupported bundle version");
    ModelBundle b{model_from_json(doc.at("model")), recipe_from_json(doc.at("recipe")),
                  doc.at("class_names").get<std::vector<std::string>>()};
    if (b.recipe.names.size() != static_cast<std::size_t>(b.model.n_kernels()) ||
        b.recipe.train_indices.size() != b.model.labels.size())
      throw Error(ErrorCode::ParseError, "model and kernel recipe disagree");
    return b;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model bundle: ") + e.what());
  }
}

void write_sweep_csv(const std::filesystem::path& path, const SweepReport& report) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.precision(17);
  out << to_string(report.spec.param)
      << ",status,mean_accuracy,std_accuracy,mean_baseline_accuracy,mean_sparsity,mean_sum_beta\n";
  for (const SweepPoint& p : report.points) {
    out << p.value << ',';
    if (p.report)
      out << "ok," << p.report->mean_accuracy << ',' << p.report->std_accuracy << ','
          << p.report->mean_baseline_accuracy << ',' << p.report->mean_sparsity << ',' << p.report->mean_sum_beta;
    else
      out << to_string(*p.error_code) << ",,,,,";
    out << '\n';
  }
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace lmmk::pipeline

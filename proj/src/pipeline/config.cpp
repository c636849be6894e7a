#include "lmmk/pipeline/config.hpp"

#include <set>

#include "lmmk/model_io.hpp"
#include "lmmk/pipeline/reports.hpp"

namespace lmmk::pipeline {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::ConfigError, where + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (!known.count(key)) throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in " + where);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

CliConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  CliConfig cfg;
  try {
    reject_unknown(doc, {"input", "hyperparams", "split", "k_classify", "record_timings", "output", "sweep", "tune", "lp"},
                   "config");
    if (doc.contains("input")) {
      const json& in = doc.at("input");
      reject_unknown(in, {"features", "labels", "matrices", "kind", "kernel_mode"}, "input");
      if (in.contains("features")) cfg.input.features = resolve(base_dir, in.at("features").get<std::string>());
      if (in.contains("labels")) cfg.input.labels = resolve(base_dir, in.at("labels").get<std::string>());
      if (in.contains("matrices"))
        for (const auto& m : in.at("matrices")) cfg.input.matrices.push_back(resolve(base_dir, m.get<std::string>()));
      if (in.contains("kind")) cfg.input.kind = parse_precomputed_kind(in.at("kind").get<std::string>());
      if (in.contains("kernel_mode")) cfg.input.mode = parse_kernel_mode(in.at("kernel_mode").get<std::string>());
    }
    if (doc.contains("hyperparams")) {
      reject_unknown(doc.at("hyperparams"), {"k", "mu", "lambda", "outer_iters", "constraint_form"}, "hyperparams");
      cfg.run.hp = hyperparams_from_json(doc.at("hyperparams"), cfg.run.hp);
    }
    if (doc.contains("split")) {
      const json& s = doc.at("split");
      reject_unknown(s, {"train_fraction", "reps", "seed"}, "split");
      if (s.contains("train_fraction")) cfg.run.split.train_fraction = s.at("train_fraction").get<double>();
      if (s.contains("reps")) cfg.run.split.reps = s.at("reps").get<int>();
      if (s.contains("seed")) cfg.run.split.seed = s.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("k_classify")) cfg.run.k_classify = doc.at("k_classify").get<int>();
    if (doc.contains("record_timings")) cfg.run.record_timings = doc.at("record_timings").get<bool>();
    if (doc.contains("output")) {
      const auto out = doc.at("output").get<std::string>();
      cfg.output = out == "-" ? std::filesystem::path("-") : resolve(base_dir, out);
    }
    if (doc.contains("sweep")) {
      const json& s = doc.at("sweep");
      reject_unknown(s, {"param", "values"}, "sweep");
      if (s.contains("param")) cfg.sweep.param = parse_sweep_param(s.at("param").get<std::string>());
      if (s.contains("values")) cfg.sweep.values = s.at("values").get<std::vector<double>>();
    }
    if (doc.contains("tune")) {
      const json& t = doc.at("tune");
      reject_unknown(t, {"k", "mu", "lambda", "folds"}, "tune");
      if (t.contains("k")) cfg.tune.ks = t.at("k").get<std::vector<int>>();
      if (t.contains("mu")) cfg.tune.mus = t.at("mu").get<std::vector<double>>();
      if (t.contains("lambda")) cfg.tune.lambdas = t.at("lambda").get<std::vector<double>>();
      if (t.contains("folds")) cfg.tune.folds = t.at("folds").get<int>();
    }
    if (doc.contains("lp")) {
      reject_unknown(doc.at("lp"), {"max_iters"}, "lp");
      if (doc.at("lp").contains("max_iters")) cfg.run.lp.max_iters = doc.at("lp").at("max_iters").get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return cfg;
}

CliConfig load_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = read_json(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.detail());
  }
  return config_from_json(doc, path.parent_path());
}

}  // namespace lmmk::pipeline

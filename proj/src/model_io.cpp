#include "lmmk/model_io.hpp"

#include "lmmk/error.hpp"

namespace lmmk {

using nlohmann::json;

json hyperparams_to_json(const Hyperparams& hp) {
  return {{"k", hp.k},
          {"mu", hp.mu},
          {"lambda", hp.lambda},
          {"outer_iters", hp.outer_iters},
          {"constraint_form", std::string(to_string(hp.constraint_form))}};
}

Hyperparams hyperparams_from_json(const json& doc, Hyperparams hp) {
  try {
    if (doc.contains("k")) hp.k = doc.at("k").get<int>();
    if (doc.contains("mu")) hp.mu = doc.at("mu").get<double>();
    if (doc.contains("lambda")) hp.lambda = doc.at("lambda").get<double>();
    if (doc.contains("outer_iters")) hp.outer_iters = doc.at("outer_iters").get<int>();
    if (doc.contains("constraint_form"))
      hp.constraint_form = parse_constraint_form(doc.at("constraint_form").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("hyperparameters: ") + e.what());
  }
  hp.validate();
  return hp;
}

json model_to_json(const TrainedModel& model) {
  json trace = json::array();
  for (const RoundRecord& r : model.objective_trace) {
    trace.push_back({{"lp_objective", r.lp_objective},
                     {"objective", r.objective},
                     {"sum_beta", r.sum_beta},
                     {"n_triples", r.n_triples},
                     {"lp_iterations", r.lp_iterations}});
  }
  const auto beta = model.weights.beta();
  return {{"format", "lmmk-model"},
          {"version", kModelFormatVersion},
          {"beta", std::vector<double>(beta.begin(), beta.end())},
          {"zero_tolerance", model.weights.zero_tolerance()},
          {"kernel_names", model.kernel_names},
          {"labels", model.labels},
          {"hyperparams", hyperparams_to_json(model.hyperparams)},
          {"objective_trace", trace},
          {"best_round", model.best_round}};
}

TrainedModel model_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "lmmk-model")
      throw Error(ErrorCode::ParseError, "not an lmmk-model document");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw Error(ErrorCode::ParseError, "unsupported model version " + std::to_string(version));
    TrainedModel model;
    model.weights = KernelWeights(doc.at("beta").get<std::vector<double>>(), doc.at("zero_tolerance").get<double>());
    model.kernel_names = doc.at("kernel_names").get<std::vector<std::string>>();
    model.labels = doc.at("labels").get<Labels>();
    model.hyperparams = hyperparams_from_json(doc.at("hyperparams"));
    for (const json& r : doc.at("objective_trace")) {
      model.objective_trace.push_back({r.at("lp_objective").get<double>(), r.at("objective").get<double>(),
                                       r.at("sum_beta").get<double>(), r.at("n_triples").get<std::size_t>(),
                                       r.at("lp_iterations").get<std::size_t>()});
    }
    model.best_round = doc.at("best_round").get<std::size_t>();
    if (static_cast<Index>(model.kernel_names.size()) != model.weights.size())
      throw Error(ErrorCode::ParseError, "kernel names and beta differ in length");
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model document: ") + e.what());
  }
}

}  // namespace lmmk

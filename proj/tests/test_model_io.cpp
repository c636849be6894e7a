#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "lmmk/error.hpp"
#include "lmmk/model_io.hpp"

using namespace lmmk;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

TrainedModel awkward_model() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> beta{0.1, 1.0 / 3.0, 0.0, 5e-324, 1e300, u(rng), u(rng) * 1e-7};
  TrainedModel m;
  m.weights = KernelWeights(beta, 1.2345678901234567e-6);
  m.labels = {1, 2, 3, 1};
  m.hyperparams = {4, 0.65, 0.015, 5, ConstraintForm::PaperLiteral};
  m.kernel_names = {"a", "b,c", "\"q\"", "d", "e", "f", "g"};
  m.objective_trace = {{1.0 / 7.0, 2.0 / 3.0, 0.3, 12, 40}, {0.1, 0.2, 0.30000000000000004, 11, 7}};
  m.best_round = 1;
  return m;
}

}  // namespace

TEST(ModelIo, RoundTripIsBitExact) {
  const auto m = awkward_model();
  const auto text = model_to_json(m).dump();
  const auto back = model_from_json(nlohmann::json::parse(text));
  ASSERT_EQ(back.weights.size(), m.weights.size());
  for (Index i = 0; i < m.weights.size(); ++i) EXPECT_TRUE(same_bits(back.weights[i], m.weights[i]));
  EXPECT_TRUE(same_bits(back.weights.zero_tolerance(), m.weights.zero_tolerance()));
  EXPECT_EQ(back.labels, m.labels);
  EXPECT_EQ(back.hyperparams, m.hyperparams);
  EXPECT_EQ(back.kernel_names, m.kernel_names);
  EXPECT_EQ(back.objective_trace, m.objective_trace);
  EXPECT_EQ(back.best_round, m.best_round);
  EXPECT_EQ(model_to_json(back).dump(), text);
}

TEST(ModelIo, RejectsWrongFormatOrVersion) {
  auto doc = model_to_json(awkward_model());
  auto wrong = doc;
  wrong["version"] = 99;
  EXPECT_THROW(model_from_json(wrong), Error);
  wrong = doc;
  wrong["format"] = "other";
  EXPECT_THROW(model_from_json(wrong), Error);
  wrong = doc;
  wrong.erase("beta");
  EXPECT_THROW(model_from_json(wrong), Error);
}

TEST(ModelIo, HyperparamsDefaultsAndValidation) {
  const auto hp = hyperparams_from_json(nlohmann::json{{"lambda", 0.25}});
  EXPECT_EQ(hp.lambda, 0.25);
  EXPECT_EQ(hp.k, 3);
  EXPECT_THROW(hyperparams_from_json(nlohmann::json{{"mu", 2.0}}), Error);
  EXPECT_THROW(hyperparams_from_json(nlohmann::json{{"k", "three"}}), Error);
}

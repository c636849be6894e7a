#include <gtest/gtest.h>

#include <random>

#include "lmmk/error.hpp"
#include "lmmk/learner.hpp"
#include "lmmk/pipeline/kernel_builder.hpp"
#include "lmmk/synthetic.hpp"
#include "support/oracles.hpp"

using namespace lmmk;

namespace {

KernelSet from_features(const Matrix& x) {
  const auto data = pipeline::dataset_from_features(x, Labels(static_cast<std::size_t>(x.rows()), 1),
                                                    pipeline::KernelMode::PerFeature);
  std::vector<Index> all(static_cast<std::size_t>(x.rows()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Index>(i);
  return pipeline::build_kernels(data, all).train;
}

KernelSet single(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return KernelSet({KernelMatrix(m)}, {});
}

struct Problem {
  KernelSet ks;
  Labels labels;
};

Problem synthetic(std::uint64_t seed, int per_class = 15, int noise = 4) {
  SyntheticSpec spec;
  spec.per_class = per_class;
  spec.noise = noise;
  const auto data = make_gaussian_classes(spec, seed);
  return {from_features(data.features), data.labels};
}

}  // namespace

TEST(PullCoefficients, CoincidentPointsPullNothing) {
  const KernelSet ks({KernelMatrix(Matrix::Ones(2, 2)), KernelMatrix(Matrix::Ones(2, 2))}, {});
  const auto ts = build_triples({{1}, {}}, {{}, {}});
  const auto p = pull_coefficients(ks, ts);
  EXPECT_EQ(p, (std::vector<double>{0.0, 0.0}));
}

TEST(PullCoefficients, SinglePair) {
  const auto ks = single({{1, 0.25}, {0.25, 1}});
  const auto p = pull_coefficients(ks, build_triples({{1}, {}}, {{}, {}}));
  EXPECT_DOUBLE_EQ(p[0], 0.75);
}

TEST(PullCoefficients, EachPairCountedOnceAndMatchesLoop) {
  auto [ks, labels] = synthetic(1);
  const auto ts = make_triples(pairwise_distances(ks, KernelWeights(std::vector<double>(
                                                          static_cast<std::size_t>(ks.n_kernels()), 1.0))),
                               labels, {3});
  const auto p = pull_coefficients(ks, ts);
  for (Index m = 0; m < ks.n_kernels(); ++m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ts.targets.size(); ++i)
      for (Index j : ts.targets[i]) acc += 1.0 - ks.kernel(m)(static_cast<Index>(i), j);
    EXPECT_NEAR(p[static_cast<std::size_t>(m)], acc, 1e-12);
    EXPECT_GE(p[static_cast<std::size_t>(m)], 0.0);
  }
}

TEST(MarginRow, SymmetricTripleGivesZero) {
  const auto ks = single({{1, 0.4, 0.4}, {0.4, 1, 0.2}, {0.4, 0.2, 1}});
  EXPECT_EQ(margin_row(ks, {0, 1, 2}, ConstraintForm::Derived), std::vector<double>{0.0});
}

TEST(MarginRow, DerivedAndLiteralArithmetic) {
  const auto ks = single({{1, 0.9, 0.1}, {0.9, 1, 0.0}, {0.1, 0.0, 1}});
  EXPECT_NEAR(margin_row(ks, {0, 1, 2}, ConstraintForm::Derived)[0], 1.6, 1e-15);
  EXPECT_NEAR(margin_row(ks, {0, 1, 2}, ConstraintForm::PaperLiteral)[0], 3.6, 1e-15);
}

TEST(MarginRow, EqualsDistanceDifference) {
  std::mt19937_64 rng(2);
  std::vector<KernelMatrix> kernels;
  for (const Matrix& k : oracle::random_gaussian_kernels(rng, 12, 4)) kernels.emplace_back(k);
  const KernelSet ks(std::move(kernels), {});
  std::uniform_int_distribution<Index> idx(0, 11);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int t = 0; t < 50; ++t) {
    const Triple tr{idx(rng), idx(rng), idx(rng)};
    const auto row = margin_row(ks, tr, ConstraintForm::Derived);
    for (int r = 0; r < 20; ++r) {
      std::vector<double> beta(4);
      for (double& b : beta) b = u(rng);
      const KernelWeights w(beta);
      double dot = 0.0;
      for (std::size_t m = 0; m < 4; ++m) dot += row[m] * beta[m];
      EXPECT_NEAR(dot, rkhs_distance(ks, w, tr.anchor, tr.impostor) - rkhs_distance(ks, w, tr.anchor, tr.target), 1e-10);
    }
  }
}

TEST(AssembleLp, LayoutAndEmptyTriples) {
  auto [ks, labels] = synthetic(3, 6, 1);
  const auto ts = make_triples(pairwise_distances(ks, KernelWeights({1, 1, 1})), labels, {2});
  const Hyperparams hp{2, 0.6, 0.3, 1, ConstraintForm::Derived};
  const auto p = assemble_lp(ks, ts, hp);
  const Index d = 3, t = static_cast<Index>(ts.triples.size());
  ASSERT_EQ(p.n_variables(), d + t);
  ASSERT_EQ(p.n_constraints(), t);
  const auto pull = pull_coefficients(ks, ts);
  for (Index m = 0; m < d; ++m) EXPECT_NEAR(p.cost(m), 0.4 * pull[static_cast<std::size_t>(m)] + 0.3, 1e-15);
  for (Index r = 0; r < t; ++r) {
    EXPECT_EQ(p.cost(d + r), 0.6);
    EXPECT_EQ(p.rhs(r), 1.0);
    for (Index c = 0; c < t; ++c) EXPECT_EQ(p.constraints(r, d + c), r == c ? 1.0 : 0.0);
  }
  try {
    assemble_lp(ks, TripleSet{}, hp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyTripleSet);
  }
}

TEST(AssembleLp, ZeroMuGivesZeroWeights) {
  auto [ks, labels] = synthetic(4);
  const auto ts = make_triples(pairwise_distances(ks, KernelWeights(std::vector<double>(6, 1.0))), labels, {3});
  const auto s = lp::solve(assemble_lp(ks, ts, {3, 0.0, 0.1, 1, ConstraintForm::Derived}));
  ASSERT_EQ(s.status, lp::Status::Optimal);
  EXPECT_LE(s.values.head(6).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(AssembleLp, HugeLambdaGivesZeroWeightsAndUnitSlacks) {
  auto [ks, labels] = synthetic(5);
  const auto ts = make_triples(pairwise_distances(ks, KernelWeights(std::vector<double>(6, 1.0))), labels, {3});
  const auto s = lp::solve(assemble_lp(ks, ts, {3, 0.5, 1e6, 1, ConstraintForm::Derived}));
  ASSERT_EQ(s.status, lp::Status::Optimal);
  EXPECT_LE(s.values.head(6).cwiseAbs().maxCoeff(), 1e-9);
  for (Index t = 6; t < s.values.size(); ++t) EXPECT_NEAR(s.values(t), 1.0, 1e-9);
}

TEST(AssembleLp, SmallInstanceMatchesVertexEnumeration) {
  std::mt19937_64 rng(6);
  std::vector<KernelMatrix> kernels;
  for (const Matrix& k : oracle::random_gaussian_kernels(rng, 4, 2)) kernels.emplace_back(k);
  const KernelSet ks(std::move(kernels), {});
  TripleSet ts = build_triples({{1}, {0}, {}, {}}, {{2, 3}, {2}, {}, {}});
  ASSERT_EQ(ts.triples.size(), 3u);
  for (double lambda : {0.0, 0.05, 0.5}) {
    const auto p = assemble_lp(ks, ts, {1, 0.5, lambda, 1, ConstraintForm::Derived});
    const auto expected = oracle::enumerate_lp(p);
    const auto s = lp::solve(p);
    ASSERT_EQ(s.status, expected.status);
    EXPECT_NEAR(s.objective, expected.objective, 1e-6);
  }
}

TEST(AssembleLp, SolutionsCertifyAndPullIdentityHolds) {
  auto [ks, labels] = synthetic(7);
  const auto ts = make_triples(pairwise_distances(ks, KernelWeights(std::vector<double>(6, 1.0))), labels, {3});
  for (double mu : {0.3, 0.5, 0.7}) {
    const Hyperparams hp{3, mu, 0.05, 1, ConstraintForm::Derived};
    const auto p = assemble_lp(ks, ts, hp);
    const auto s = lp::solve(p);
    ASSERT_EQ(s.status, lp::Status::Optimal);
    EXPECT_TRUE(lp::verify(p, s, 1e-6).passed);
    EXPECT_GE(s.values.minCoeff(), -1e-9);
    EXPECT_LE(((p.rhs - p.constraints * s.values).array().maxCoeff()), 1e-7);

    std::vector<double> beta(6);
    for (Index m = 0; m < 6; ++m) beta[static_cast<std::size_t>(m)] = std::max(0.0, s.values(m));
    const auto pull = pull_coefficients(ks, ts);
    double lp_pull = 0.0;
    for (std::size_t m = 0; m < 6; ++m) lp_pull += (1 - mu) * pull[m] * beta[m];
    double dsum = 0.0;
    for (std::size_t i = 0; i < ts.targets.size(); ++i)
      for (Index j : ts.targets[i]) dsum += rkhs_distance(ks, KernelWeights(beta), static_cast<Index>(i), j);
    EXPECT_NEAR(lp_pull, (1 - mu) / 2 * dsum, 1e-8);
  }
}

TEST(AssembleLp, SumOfWeightsNonIncreasingInLambda) {
  auto [ks, labels] = synthetic(8, 20, 6);
  const auto ts = make_triples(pairwise_distances(ks, KernelWeights(std::vector<double>(8, 1.0))), labels, {3});
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 0.1, 0.25, 1.0, 4.0, 16.0}) {
    const auto s = lp::solve(assemble_lp(ks, ts, {3, 0.5, lambda, 1, ConstraintForm::Derived}));
    ASSERT_EQ(s.status, lp::Status::Optimal);
    const double sum = s.values.head(8).sum();
    EXPECT_LE(sum, previous + 1e-8) << "lambda " << lambda;
    previous = sum;
  }
}

TEST(Train, SeparatedBlobsSatisfyEveryMargin) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.3);
  Matrix x(20, 1);
  Labels labels;
  for (Index i = 0; i < 20; ++i) {
    x(i, 0) = (i < 10 ? 0.0 : 10.0) + noise(rng);
    labels.push_back(i < 10 ? 1 : 2);
  }
  const auto ks = from_features(x);
  const Hyperparams hp{2, 0.5, 0.01, 1, ConstraintForm::Derived};
  const auto model = train(ks, labels, hp);
  ASSERT_GT(model.weights[0], 0.0);
  const auto ts = make_triples(pairwise_distances(ks, model.weights), labels, {2});
  for (const Triple& t : ts.triples) {
    const double margin = rkhs_distance(ks, model.weights, t.anchor, t.impostor) -
                          rkhs_distance(ks, model.weights, t.anchor, t.target);
    EXPECT_GE(margin, 1.0 - 1e-7);
  }
}

TEST(Train, NoiseKernelGetsZeroWeight) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal;
  Matrix x(40, 2);
  Labels labels;
  for (Index i = 0; i < 40; ++i) {
    const Label l = i % 2 + 1;
    x(i, 0) = (l == 1 ? -2.0 : 2.0) + 0.5 * normal(rng);
    x(i, 1) = normal(rng);
    labels.push_back(l);
  }
  const auto model = train(from_features(x), labels, {3, 0.5, 0.5, 3, ConstraintForm::Derived});
  EXPECT_GT(model.weights[0], model.weights.zero_tolerance());
  EXPECT_LE(model.weights[1], model.weights.zero_tolerance());
}

TEST(Train, MoreRoundsNeverWorsenBestObjective) {
  auto [ks, labels] = synthetic(11);
  Hyperparams hp{3, 0.5, 0.1, 1, ConstraintForm::Derived};
  const auto one = train(ks, labels, hp);
  hp.outer_iters = 3;
  const auto three = train(ks, labels, hp);
  ASSERT_EQ(three.objective_trace.size(), 3u);
  EXPECT_EQ(one.objective_trace[0], three.objective_trace[0]);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : three.objective_trace) best = std::min(best, r.objective);
  EXPECT_EQ(three.objective_trace[three.best_round].objective, best);
  EXPECT_LE(best, one.objective_trace[0].objective);
}

TEST(Train, DeterministicBitForBit) {
  auto [ks, labels] = synthetic(12);
  const Hyperparams hp{3, 0.6, 0.05, 3, ConstraintForm::Derived};
  const auto a = train(ks, labels, hp);
  const auto b = train(ks, labels, hp);
  ASSERT_EQ(a.weights.size(), b.weights.size());
  for (Index m = 0; m < a.weights.size(); ++m) EXPECT_EQ(a.weights[m], b.weights[m]);
  EXPECT_EQ(a.objective_trace, b.objective_trace);
}

TEST(Train, PaperLiteralFormRuns) {
  auto [ks, labels] = synthetic(13);
  const auto model = train(ks, labels, {3, 0.5, 0.1, 2, ConstraintForm::PaperLiteral});
  EXPECT_EQ(model.hyperparams.constraint_form, ConstraintForm::PaperLiteral);
  for (double b : model.weights.beta()) EXPECT_GE(b, 0.0);
}

TEST(Train, ContractErrors) {
  auto [ks, labels] = synthetic(14, 5, 0);
  Labels singleton = labels;
  singleton[0] = 4;
  try {
    train(ks, singleton, {1, 0.5, 0.1, 1, ConstraintForm::Derived});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingletonClass);
  }
  EXPECT_THROW(train(ks, Labels(labels.begin(), labels.end() - 1), {}), Error);
  EXPECT_THROW(train(ks, labels, {3, 1.5, 0.1, 1, ConstraintForm::Derived}), Error);
  EXPECT_THROW(train(ks, labels, {3, 0.5, -1.0, 1, ConstraintForm::Derived}), Error);
  EXPECT_THROW(train(ks, labels, {3, 0.5, 0.1, 0, ConstraintForm::Derived}), Error);
}

TEST(Sparsity, Thresholding) {
  EXPECT_EQ(sparsity(KernelWeights({0.0, 0.0})), 0);
  EXPECT_EQ(sparsity(KernelWeights({1.0, 0.0, 1e-12})), 1);
}

TEST(Sparsity, MatchesManualRecount) {
  auto [ks, labels] = synthetic(15);
  for (double lambda : {0.0, 0.5, 2.0}) {
    const auto model = train(ks, labels, {3, 0.5, lambda, 1, ConstraintForm::Derived});
    Index count = 0;
    for (double b : model.weights.beta()) count += b > model.weights.zero_tolerance() ? 1 : 0;
    EXPECT_EQ(sparsity(model.weights), count);
  }
}

TEST(ConstraintFormNames, RoundTrip) {
  for (auto f : {ConstraintForm::Derived, ConstraintForm::PaperLiteral})
    EXPECT_EQ(parse_constraint_form(to_string(f)), f);
  EXPECT_THROW(parse_constraint_form("other"), Error);
}

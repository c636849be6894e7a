#include "lmmk/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "lmmk/error.hpp"

namespace lmmk {

namespace {

KernelWeights uniform(Index d) { return KernelWeights(std::vector<double>(static_cast<std::size_t>(d), 1.0)); }

bool same_neighbors(const TripleSet& a, const TripleSet& b) {
  return a.targets == b.targets && a.impostors == b.impostors;
}

}  // namespace

std::string_view to_string(ConstraintForm form) {
  return form == ConstraintForm::Derived ? "derived" : "paper-literal";
}

ConstraintForm parse_constraint_form(std::string_view text) {
  if (text == "derived") return ConstraintForm::Derived;
  if (text == "paper-literal" || text == "paper_literal" || text == "literal") return ConstraintForm::PaperLiteral;
  throw Error(ErrorCode::ConfigError, "unknown constraint form '" + std::string(text) + "'");
}

void Hyperparams::validate() const {
  if (k < 1) throw Error(ErrorCode::ConfigError, "k must be >= 1");
  if (!(mu >= 0.0 && mu <= 1.0)) throw Error(ErrorCode::ConfigError, "mu must lie in [0, 1]");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::ConfigError, "lambda must be >= 0");
  if (outer_iters < 1) throw Error(ErrorCode::ConfigError, "outer_iters must be >= 1");
}

std::vector<double> pull_coefficients(const KernelSet& ks, const TripleSet& triples) {
  if (static_cast<Index>(triples.n_anchors()) != ks.n_samples())
    throw Error(ErrorCode::DimensionMismatch, "triple set and kernel set cover different samples");
  const Index d = ks.n_kernels();
  std::vector<double> p(static_cast<std::size_t>(d), 0.0);
#pragma omp parallel for schedule(static)
  for (Index m = 0; m < d; ++m) {
    const Matrix& k = ks.kernel(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < triples.targets.size(); ++i)
      for (Index j : triples.targets[i]) acc += 1.0 - k(static_cast<Index>(i), j);
    p[static_cast<std::size_t>(m)] = acc;
  }
  return p;
}

std::vector<double> margin_row(const KernelSet& ks, const Triple& t, ConstraintForm form) {
  std::vector<double> row(static_cast<std::size_t>(ks.n_kernels()));
  const double offset = form == ConstraintForm::PaperLiteral ? 1.0 : 0.0;
  for (Index m = 0; m < ks.n_kernels(); ++m) {
    const Matrix& k = ks.kernel(m);
    row[static_cast<std::size_t>(m)] = 2.0 * (offset + k(t.anchor, t.target) - k(t.anchor, t.impostor));
  }
  return row;
}

lp::Problem assemble_lp(const KernelSet& ks, const TripleSet& triples, const Hyperparams& hp) {
  hp.validate();
  if (triples.triples.empty()) throw Error(ErrorCode::EmptyTripleSet, "no margin triples to constrain");
  const Index d = ks.n_kernels();
  const auto n_triples = static_cast<Index>(triples.triples.size());
  const auto pull = pull_coefficients(ks, triples);

  lp::Problem problem;
  problem.cost.resize(d + n_triples);
  for (Index m = 0; m < d; ++m) problem.cost(m) = (1.0 - hp.mu) * pull[static_cast<std::size_t>(m)] + hp.lambda;
  problem.cost.tail(n_triples).setConstant(hp.mu);
  problem.rhs = Vector::Ones(n_triples);
  problem.constraints = Matrix::Zero(n_triples, d + n_triples);
#pragma omp parallel for schedule(static)
  for (Index t = 0; t < n_triples; ++t) {
    const auto row = margin_row(ks, triples.triples[static_cast<std::size_t>(t)], hp.constraint_form);
    for (Index m = 0; m < d; ++m) problem.constraints(t, m) = row[static_cast<std::size_t>(m)];
    problem.constraints(t, d + t) = 1.0;
  }
  return problem;
}

double lmmk_objective(const KernelSet& ks, const TripleSet& triples, const KernelWeights& w,
                      const Hyperparams& hp) {
  const Matrix dist = pairwise_distances(ks, w);
  double pull = 0.0;
  for (std::size_t i = 0; i < triples.targets.size(); ++i)
    for (Index j : triples.targets[i]) pull += dist(static_cast<Index>(i), j);
  double hinge = 0.0;
  for (const Triple& t : triples.triples)
    hinge += std::max(0.0, 1.0 - dist(t.anchor, t.impostor) + dist(t.anchor, t.target));
  return (1.0 - hp.mu) * pull + hp.mu * hinge + hp.lambda * w.sum();
}

TrainedModel train(const KernelSet& ks, const Labels& labels, const Hyperparams& hp,
                   const lp::Options& lp_options) {
  hp.validate();
  if (static_cast<Index>(labels.size()) != ks.n_samples())
    throw Error(ErrorCode::DimensionMismatch, std::to_string(labels.size()) + " labels for " +
                                                  std::to_string(ks.n_samples()) + " samples");
  const Index d = ks.n_kernels();
  const NeighborhoodSpec spec{hp.k};

  TrainedModel model;
  model.labels = labels;
  model.hyperparams = hp;
  model.kernel_names = ks.names();

  KernelWeights geometry = uniform(d);
  KernelWeights last = geometry;
  TripleSet previous;
  double best_objective = std::numeric_limits<double>::infinity();
  for (int round = 0; round < hp.outer_iters; ++round) {
    TripleSet triples = make_triples(pairwise_distances(ks, geometry), labels, spec);

    RoundRecord record;
    KernelWeights weights = geometry;
    if (round > 0 && same_neighbors(triples, previous)) {
      // Same neighbors, same LP: repeat the previous round's result.
      record = model.objective_trace.back();
      weights = last;
    } else {
      const lp::Problem problem = assemble_lp(ks, triples, hp);
      const lp::Solution solution = lp::solve(problem, lp_options);
      if (solution.status != lp::Status::Optimal)
        throw Error(ErrorCode::LPNotOptimal, "round " + std::to_string(round + 1) + " ended with status " +
                                                 std::string(lp::to_string(solution.status)));
      std::vector<double> beta(static_cast<std::size_t>(d));
      for (Index m = 0; m < d; ++m) beta[static_cast<std::size_t>(m)] = std::max(solution.values(m), 0.0);
      weights = KernelWeights(std::move(beta));
      record.lp_objective = solution.objective;
      record.objective = lmmk_objective(ks, triples, weights, hp);
      record.sum_beta = weights.sum();
      record.n_triples = triples.triples.size();
      record.lp_iterations = solution.iterations;
    }
    model.objective_trace.push_back(record);
    spdlog::debug("round {}: objective {:.6g}, sum beta {:.6g}, {} triples", round + 1, record.objective,
                  record.sum_beta, record.n_triples);

    if (record.objective < best_objective) {
      best_objective = record.objective;
      model.best_round = static_cast<std::size_t>(round);
      model.weights = weights;
    }
    previous = std::move(triples);
    last = weights;
    // Zero weights give no geometry to select neighbors under.
    geometry = sparsity(weights) == 0 ? uniform(d) : weights;
  }

  if (sparsity(model.weights) == 0)
    spdlog::warn("all kernel weights are zero (lambda={} may be too large); prediction uses uniform weights",
                 hp.lambda);
  return model;
}

bool TrainedModel::zero_weights() const { return sparsity(weights) == 0; }

Index sparsity(const KernelWeights& w) {
  const auto beta = w.beta();
  return std::count_if(beta.begin(), beta.end(), [&](double b) { return b > w.zero_tolerance(); });
}

}  // namespace lmmk

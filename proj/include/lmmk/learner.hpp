#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lmmk/kernelspace.hpp"
#include "lmmk/lp.hpp"
#include "lmmk/neighborhood.hpp"

namespace lmmk {

/// Margin row of each triple.
///  - Derived: 2 (K_ij - K_il), i.e. D(i,l) - D(i,j) per unit weight for
///    unit-diagonal kernels.
///  - PaperLiteral: 2 (1 + K_ij - K_il), which adds 2 sum(beta) to every
///    margin.
enum class ConstraintForm { Derived, PaperLiteral };

std::string_view to_string(ConstraintForm form);
ConstraintForm parse_constraint_form(std::string_view text);

struct Hyperparams {
  int k = 3;
  double mu = 0.5;       // pull (1 - mu) vs push (mu)
  double lambda = 0.1;   // l1 weight on beta
  int outer_iters = 3;   // neighbor refresh rounds
  ConstraintForm constraint_form = ConstraintForm::Derived;

  void validate() const;
  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

struct RoundRecord {
  double lp_objective = 0.0;
  /// Pull + hinge + l1 with true RKHS distances over this round's triples.
  double objective = 0.0;
  double sum_beta = 0.0;
  std::size_t n_triples = 0;
  std::size_t lp_iterations = 0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct TrainedModel {
  KernelWeights weights{std::vector<double>{1.0}};
  Labels labels;
  Hyperparams hyperparams;
  std::vector<RoundRecord> objective_trace;
  std::vector<std::string> kernel_names;
  std::size_t best_round = 0;

  Index n_kernels() const noexcept { return weights.size(); }
  /// No weight above the zero tolerance; prediction then falls back to
  /// uniform weights.
  bool zero_weights() const;
};

/// p_m = sum over target pairs (i, j) of (1 - K_m(i,j)); each pair once.
std::vector<double> pull_coefficients(const KernelSet& ks, const TripleSet& triples);

std::vector<double> margin_row(const KernelSet& ks, const Triple& triple, ConstraintForm form);

/// Variables [beta (d) | xi (one per triple)]; cost [(1-mu) p + lambda, mu];
/// one row margin_row . beta + xi >= 1 per triple.
lp::Problem assemble_lp(const KernelSet& ks, const TripleSet& triples, const Hyperparams& hp);

/// (1-mu) sum_pairs D(i,j) + mu sum_triples max(0, 1 - D(i,l) + D(i,j)) + lambda sum(beta).
double lmmk_objective(const KernelSet& ks, const TripleSet& triples, const KernelWeights& w,
                      const Hyperparams& hp);

/// Neighbor refresh loop: round 1 selects neighbors under uniform weights,
/// later rounds under the previous round's weights. Returns the round with
/// the lowest lmmk_objective. Throws LPNotOptimal if a round's LP fails.
TrainedModel train(const KernelSet& ks, const Labels& labels, const Hyperparams& hp,
                   const lp::Options& lp_options = {});

/// Weights strictly above the zero tolerance.
Index sparsity(const KernelWeights& w);

}  // namespace lmmk

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>

#include "lmmk/matrix.hpp"

namespace lmmk::lp {

/// minimize cost . v  subject to  constraints * v >= rhs,  v >= 0.
struct Problem {
  Vector cost;
  Matrix constraints;
  Vector rhs;

  Index n_variables() const noexcept { return cost.size(); }
  Index n_constraints() const noexcept { return rhs.size(); }

  /// Throws InvalidArgument / DimensionMismatch when the invariants fail.
  void validate() const;
};

enum class Status { Optimal, Unbounded, Infeasible, IterationLimit };

std::string_view to_string(Status status);

/// How the problem is attacked.
///  - Dual: bounded-variable simplex on the dual, where every column with a
///    single positive entry becomes an upper bound on one dual variable.
///    The dual has one row per remaining column, so LPs whose rows each own
///    a private slack-like column (the LMMK margin LP) reduce to d rows.
///  - Primal: two-phase simplex on the slack-augmented primal.
///  - Auto: Dual, falling back to Primal when the dual is infeasible (the
///    primal is then unbounded or infeasible and Primal tells which).
enum class Method { Auto, Dual, Primal };

struct Options {
  /// 0 selects 50 * (V + M).
  std::size_t max_iters = 0;
  double pivot_tol = 1e-9;
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-8;
  /// Dantzig pricing switches to Bland's rule after this many iterations;
  /// 0 selects 10 * (V + M).
  std::size_t bland_after = 0;
  Method method = Method::Auto;
};

struct Solution {
  Status status = Status::IterationLimit;
  /// Primal point (length V). For IterationLimit, the last iterate.
  Vector values;
  double objective = 0.0;
  /// Row multipliers y >= 0 (length M) when Optimal.
  Vector duals;
  /// Unbounded: a primal ray r >= 0 with A r >= 0 and cost . r < 0.
  /// Infeasible: a Farkas vector y >= 0 with A^T y <= 0 and rhs . y > 0.
  Vector certificate;
  std::size_t iterations = 0;
  Method method_used = Method::Auto;
};

Solution solve(const Problem& problem, const Options& options = {});

struct Verification {
  double primal_violation = 0.0;       // max(rhs - A v)+
  double bound_violation = 0.0;        // max(-v)+
  double dual_violation = 0.0;         // max(A^T y - cost)+ and max(-y)+
  double complementarity = 0.0;        // max |y_i s_i| and max |v_j r_j|
  double duality_gap = 0.0;            // |cost.v - rhs.y| / max(1, |cost.v|)
  bool has_duals = false;
  bool passed = false;
};

/// Residuals of `solution` against `problem`; passes iff every residual is
/// at most `tol`. Dual residuals are checked only when duals are present.
Verification verify(const Problem& problem, const Solution& solution, double tol = 1e-6);

/// Plain-text listing, one constraint per line, for external cross-checks:
///
///   lp V M
///   min c_0 c_1 ...
///   row i: a_i0 a_i1 ... >= b_i
void write_listing(std::ostream& out, const Problem& problem);

}  // namespace lmmk::lp

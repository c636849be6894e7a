#pragma once

// Dense-tableau primal simplex for
//
//   minimize cost . x   subject to   rows * x = rhs,   0 <= x <= upper,
//
// started from a caller-supplied feasible basis whose columns form an
// identity in `rows`. Nonbasic variables sit at either bound, so box
// constraints never become rows (bound flips cost O(m) instead of a pivot).

#include <cstddef>
#include <limits>
#include <vector>

#include "lmmk/matrix.hpp"

namespace lmmk::lp::detail {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class ColumnState : unsigned char { Basic, AtLower, AtUpper };

struct Tolerances {
  double pivot = 1e-9;
  double optimality = 1e-8;
};

struct Budget {
  std::size_t used = 0;
  std::size_t max = 0;
  std::size_t bland_after = 0;

  bool exhausted() const noexcept { return used >= max; }
};

enum class Outcome { Optimal, Unbounded, IterationLimit };

class BoundedSimplex {
 public:
  /// `rows` is m x n; `basis[r]` must be a unit column e_r of `rows` and
  /// `rhs` must satisfy the bounds of the basic variables.
  BoundedSimplex(Matrix rows, const Vector& rhs, Vector upper, std::vector<Index> basis);

  /// Runs to optimality for `cost` (length n).
  Outcome run(const Vector& cost, Budget& budget, const Tolerances& tol);

  /// Values of all n variables at the current basis.
  Vector values() const;

  /// cost_j - cost_B^T B^{-1} A_j for the last cost passed to run().
  const Vector& reduced_costs() const noexcept { return reduced_; }

  /// Set after run() returned Unbounded: the entering column. Along the
  /// ray that column grows at unit rate and basic variables change by
  /// -column_of_tableau.
  Index unbounded_column() const noexcept { return ray_column_; }
  Vector ray() const;

  /// Changes a nonbasic or basic variable's upper bound.
  void set_upper(Index column, double value) { upper_(column) = value; }

  Index n_rows() const noexcept { return tableau_.rows(); }
  Index n_cols() const noexcept { return tableau_.cols() - 1; }

 private:
  void price(const Vector& cost);
  void pivot(Index row, Index column);
  void refresh_basic_values();
  Index choose_entering(bool bland, double tol) const;

  // m x (n + 1): B^{-1} [A | b].
  Matrix tableau_;
  Vector upper_;
  std::vector<Index> basis_;
  std::vector<ColumnState> state_;
  Vector basic_values_;
  Vector reduced_;
  Index ray_column_ = -1;
};

}  // namespace lmmk::lp::detail

#include "bounded_simplex.hpp"

#include <cmath>
#include <utility>

namespace lmmk::lp::detail {

BoundedSimplex::BoundedSimplex(Matrix rows, const Vector& rhs, Vector upper, std::vector<Index> basis)
    : upper_(std::move(upper)), basis_(std::move(basis)) {
  const Index m = rows.rows();
  const Index n = rows.cols();
  tableau_.resize(m, n + 1);
  tableau_.leftCols(n) = rows;
  tableau_.col(n) = rhs;
  state_.assign(static_cast<std::size_t>(n), ColumnState::AtLower);
  for (Index b : basis_) state_[static_cast<std::size_t>(b)] = ColumnState::Basic;
  basic_values_ = rhs;
  reduced_ = Vector::Zero(n);
}

void BoundedSimplex::price(const Vector& cost) {
  const Index n = n_cols();
  reduced_ = cost;
  for (Index r = 0; r < n_rows(); ++r) {
    const double cb = cost(basis_[static_cast<std::size_t>(r)]);
    if (cb != 0.0) reduced_.noalias() -= cb * tableau_.row(r).head(n).transpose();
  }
}

void BoundedSimplex::pivot(Index row, Index column) {
  tableau_.row(row) /= tableau_(row, column);
  const auto pivot_row = tableau_.row(row);
  for (Index r = 0; r < n_rows(); ++r) {
    if (r == row) continue;
    const double factor = tableau_(r, column);
    if (factor != 0.0) tableau_.row(r).noalias() -= factor * pivot_row;
  }
  const double d = reduced_(column);
  if (d != 0.0) reduced_.noalias() -= d * pivot_row.head(n_cols()).transpose();
}

void BoundedSimplex::refresh_basic_values() {
  basic_values_ = tableau_.col(n_cols());
  for (Index j = 0; j < n_cols(); ++j)
    if (state_[static_cast<std::size_t>(j)] == ColumnState::AtUpper)
      basic_values_.noalias() -= upper_(j) * tableau_.col(j);
}

Index BoundedSimplex::choose_entering(bool bland, double tol) const {
  Index best = -1;
  double best_score = 0.0;
  for (Index j = 0; j < n_cols(); ++j) {
    const auto s = state_[static_cast<std::size_t>(j)];
    double score = 0.0;
    if (s == ColumnState::AtLower && reduced_(j) < -tol && upper_(j) > 0.0)
      score = -reduced_(j);
    else if (s == ColumnState::AtUpper && reduced_(j) > tol)
      score = reduced_(j);
    else
      continue;
    if (bland) return j;
    if (score > best_score) {
      best = j;
      best_score = score;
    }
  }
  return best;
}

Outcome BoundedSimplex::run(const Vector& cost, Budget& budget, const Tolerances& tol) {
  price(cost);
  ray_column_ = -1;
  bool refreshed = false;
  while (true) {
    const bool bland = budget.used >= budget.bland_after;
    const Index q = choose_entering(bland, tol.optimality);
    if (q < 0) {
      if (refreshed) break;
      // Incremental updates drift; confirm optimality on fresh values.
      price(cost);
      refresh_basic_values();
      refreshed = true;
      continue;
    }
    refreshed = false;
    if (budget.exhausted()) return Outcome::IterationLimit;
    ++budget.used;

    const double dir = state_[static_cast<std::size_t>(q)] == ColumnState::AtLower ? 1.0 : -1.0;
    double theta = upper_(q);  // bound flip distance, infinite if unbounded above
    Index leave = -1;
    bool leave_to_upper = false;
    double leave_alpha = 0.0;
    for (Index r = 0; r < n_rows(); ++r) {
      const double alpha = tableau_(r, q);
      if (std::abs(alpha) <= tol.pivot) continue;
      const double rate = -dir * alpha;
      const Index b = basis_[static_cast<std::size_t>(r)];
      double limit;
      if (rate < 0.0) {
        limit = std::max(basic_values_(r), 0.0) / -rate;
      } else {
        if (!std::isfinite(upper_(b))) continue;
        limit = std::max(upper_(b) - basic_values_(r), 0.0) / rate;
      }
      bool take = false;
      if (limit < theta) {
        take = true;
      } else if (limit == theta && leave >= 0) {
        take = bland ? b < basis_[static_cast<std::size_t>(leave)] : std::abs(alpha) > std::abs(leave_alpha);
      }
      if (take) {
        theta = limit;
        leave = r;
        leave_to_upper = rate > 0.0;
        leave_alpha = alpha;
      }
    }

    if (!std::isfinite(theta)) {
      ray_column_ = q;
      return Outcome::Unbounded;
    }

    basic_values_.noalias() -= dir * theta * tableau_.col(q);
    if (leave < 0) {
      state_[static_cast<std::size_t>(q)] =
          dir > 0.0 ? ColumnState::AtUpper : ColumnState::AtLower;
      continue;
    }
    const double entering_value = dir > 0.0 ? theta : upper_(q) - theta;
    const Index leaving = basis_[static_cast<std::size_t>(leave)];
    state_[static_cast<std::size_t>(leaving)] = leave_to_upper ? ColumnState::AtUpper : ColumnState::AtLower;
    pivot(leave, q);
    basis_[static_cast<std::size_t>(leave)] = q;
    state_[static_cast<std::size_t>(q)] = ColumnState::Basic;
    basic_values_(leave) = entering_value;
  }
  return Outcome::Optimal;
}

Vector BoundedSimplex::values() const {
  Vector x = Vector::Zero(n_cols());
  for (Index j = 0; j < n_cols(); ++j)
    if (state_[static_cast<std::size_t>(j)] == ColumnState::AtUpper) x(j) = upper_(j);
  for (Index r = 0; r < n_rows(); ++r) x(basis_[static_cast<std::size_t>(r)]) = basic_values_(r);
  return x;
}

Vector BoundedSimplex::ray() const {
  Vector direction = Vector::Zero(n_cols());
  if (ray_column_ < 0) return direction;
  direction(ray_column_) = 1.0;
  for (Index r = 0; r < n_rows(); ++r)
    direction(basis_[static_cast<std::size_t>(r)]) = -tableau_(r, ray_column_);
  return direction;
}

}  // namespace lmmk::lp::detail

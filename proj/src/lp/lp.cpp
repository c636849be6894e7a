#include "lmmk/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "bounded_simplex.hpp"
#include "lmmk/error.hpp"

namespace lmmk::lp {

namespace {

using detail::BoundedSimplex;
using detail::Budget;
using detail::kInfinity;
using detail::Outcome;
using detail::Tolerances;

struct Resolved {
  std::size_t max_iters;
  std::size_t bland_after;
  Tolerances tol;
};

Resolved resolve(const Problem& p, const Options& o) {
  const auto size = static_cast<std::size_t>(p.n_variables() + p.n_constraints());
  return {o.max_iters ? o.max_iters : 50 * size, o.bland_after ? o.bland_after : 10 * size,
          Tolerances{o.pivot_tol, o.optimality_tol}};
}

void finish(const Problem& p, Solution& s, double feasibility_tol) {
  for (Index j = 0; j < s.values.size(); ++j)
    if (s.values(j) < 0.0 && s.values(j) > -feasibility_tol) s.values(j) = 0.0;
  for (Index i = 0; i < s.duals.size(); ++i)
    if (s.duals(i) < 0.0 && s.duals(i) > -feasibility_tol) s.duals(i) = 0.0;
  s.objective = p.cost.dot(s.values);
}

// Primal: A v - s = b, rows with b > 0 get an artificial.
Solution solve_primal(const Problem& p, const Resolved& r, Budget& budget, double feasibility_tol) {
  const Index m = p.n_constraints();
  const Index nv = p.n_variables();
  std::vector<double> sign(static_cast<std::size_t>(m));
  Index n_art = 0;
  for (Index i = 0; i < m; ++i) {
    sign[static_cast<std::size_t>(i)] = p.rhs(i) > 0.0 ? 1.0 : -1.0;
    if (p.rhs(i) > 0.0) ++n_art;
  }
  const Index n = nv + m + n_art;
  Matrix rows = Matrix::Zero(m, n);
  Vector rhs(m);
  std::vector<Index> basis(static_cast<std::size_t>(m));
  Index art = nv + m;
  for (Index i = 0; i < m; ++i) {
    const double s = sign[static_cast<std::size_t>(i)];
    rows.row(i).head(nv) = s * p.constraints.row(i);
    rows(i, nv + i) = -s;
    rhs(i) = s * p.rhs(i);
    if (s > 0.0) {
      rows(i, art) = 1.0;
      basis[static_cast<std::size_t>(i)] = art++;
    } else {
      basis[static_cast<std::size_t>(i)] = nv + i;
    }
  }
  Vector upper = Vector::Constant(n, kInfinity);
  BoundedSimplex simplex(std::move(rows), rhs, std::move(upper), std::move(basis));

  Solution out;
  out.method_used = Method::Primal;
  auto primal_part = [&] { return Vector(simplex.values().head(nv)); };
  auto row_duals = [&] { return Vector(simplex.reduced_costs().segment(nv, m)); };

  if (n_art > 0) {
    Vector phase1 = Vector::Zero(n);
    phase1.tail(n_art).setOnes();
    const Outcome o = simplex.run(phase1, budget, r.tol);
    if (o == Outcome::IterationLimit) {
      out.status = Status::IterationLimit;
      out.values = primal_part();
      finish(p, out, feasibility_tol);
      return out;
    }
    const double infeasibility = simplex.values().tail(n_art).sum();
    if (infeasibility > feasibility_tol) {
      out.status = Status::Infeasible;
      out.values = primal_part();
      out.certificate = row_duals();
      finish(p, out, feasibility_tol);
      return out;
    }
    for (Index j = nv + m; j < n; ++j) simplex.set_upper(j, 0.0);
  }

  Vector cost = Vector::Zero(n);
  cost.head(nv) = p.cost;
  const Outcome o = simplex.run(cost, budget, r.tol);
  out.values = primal_part();
  if (o == Outcome::IterationLimit) {
    out.status = Status::IterationLimit;
  } else if (o == Outcome::Unbounded) {
    out.status = Status::Unbounded;
    out.certificate = simplex.ray().head(nv);
  } else {
    out.status = Status::Optimal;
    out.duals = row_duals();
  }
  finish(p, out, feasibility_tol);
  return out;
}

struct DualLayout {
  std::vector<Index> general;         // primal columns kept as dual rows
  Vector upper;                       // per primal row: bound on y
  std::vector<Index> designated;      // per primal row: singleton column achieving the bound, or -1
  bool infeasible = false;            // some bound is negative
};

DualLayout layout_dual(const Problem& p) {
  const Index m = p.n_constraints();
  const Index nv = p.n_variables();
  // Row-major scan: nonzero count and owning row per column.
  std::vector<Index> nonzeros(static_cast<std::size_t>(nv), 0);
  std::vector<Index> owner(static_cast<std::size_t>(nv), -1);
  for (Index i = 0; i < m; ++i) {
    const auto row = p.constraints.row(i);
    for (Index j = 0; j < nv; ++j)
      if (row(j) != 0.0) {
        ++nonzeros[static_cast<std::size_t>(j)];
        owner[static_cast<std::size_t>(j)] = i;
      }
  }
  DualLayout out;
  out.upper = Vector::Constant(m, kInfinity);
  out.designated.assign(static_cast<std::size_t>(m), -1);
  for (Index j = 0; j < nv; ++j) {
    const Index row = owner[static_cast<std::size_t>(j)];
    if (nonzeros[static_cast<std::size_t>(j)] == 1 && p.constraints(row, j) > 0.0) {
      const double bound = p.cost(j) / p.constraints(row, j);
      if (bound < out.upper(row)) {
        out.upper(row) = bound;
        out.designated[static_cast<std::size_t>(row)] = j;
      }
    } else {
      out.general.push_back(j);
    }
  }
  out.infeasible = (out.upper.array() < 0.0).any();
  return out;
}

// Dual: maximize b.y  s.t.  A_G^T y <= c_G,  0 <= y <= upper, solved as
// minimize -b.y with one row per general column plus its slack.
Solution solve_dual(const Problem& p, const DualLayout& layout, const Resolved& r, Budget& budget,
                    double feasibility_tol, bool& dual_infeasible) {
  dual_infeasible = false;
  const Index m = p.n_constraints();
  const auto k = static_cast<Index>(layout.general.size());
  std::vector<double> sign(static_cast<std::size_t>(k));
  Index n_art = 0;
  for (Index g = 0; g < k; ++g) {
    const double c = p.cost(layout.general[static_cast<std::size_t>(g)]);
    sign[static_cast<std::size_t>(g)] = c < 0.0 ? -1.0 : 1.0;
    if (c < 0.0) ++n_art;
  }
  const Index n = m + k + n_art;
  Matrix rows = Matrix::Zero(k, n);
  Vector rhs(k);
  std::vector<Index> basis(static_cast<std::size_t>(k));
  Index art = m + k;
  for (Index g = 0; g < k; ++g) {
    const Index col = layout.general[static_cast<std::size_t>(g)];
    const double s = sign[static_cast<std::size_t>(g)];
    rows.row(g).head(m) = s * p.constraints.col(col).transpose();
    rows(g, m + g) = s;
    rhs(g) = s * p.cost(col);
    if (s < 0.0) {
      rows(g, art) = 1.0;
      basis[static_cast<std::size_t>(g)] = art++;
    } else {
      basis[static_cast<std::size_t>(g)] = m + g;
    }
  }
  Vector upper = Vector::Constant(n, kInfinity);
  upper.head(m) = layout.upper;
  BoundedSimplex simplex(std::move(rows), rhs, std::move(upper), std::move(basis));

  Solution out;
  out.method_used = Method::Dual;

  // Primal point implied by the current dual basis.
  auto recover = [&] {
    const Vector& reduced = simplex.reduced_costs();
    Vector v = Vector::Zero(p.n_variables());
    for (Index g = 0; g < k; ++g)
      v(layout.general[static_cast<std::size_t>(g)]) = std::max(reduced(m + g), 0.0);
    const Vector residual = p.rhs - p.constraints * v;
    for (Index i = 0; i < m; ++i) {
      const Index j = layout.designated[static_cast<std::size_t>(i)];
      if (j >= 0 && residual(i) > 0.0) v(j) = residual(i) / p.constraints(i, j);
    }
    return v;
  };

  if (n_art > 0) {
    Vector phase1 = Vector::Zero(n);
    phase1.tail(n_art).setOnes();
    const Outcome o = simplex.run(phase1, budget, r.tol);
    if (o == Outcome::IterationLimit) {
      out.status = Status::IterationLimit;
      out.values = Vector::Zero(p.n_variables());
      finish(p, out, feasibility_tol);
      return out;
    }
    if (simplex.values().tail(n_art).sum() > feasibility_tol) {
      dual_infeasible = true;
      return out;
    }
    for (Index j = m + k; j < n; ++j) simplex.set_upper(j, 0.0);
  }

  Vector cost = Vector::Zero(n);
  cost.head(m) = -p.rhs;
  const Outcome o = simplex.run(cost, budget, r.tol);
  if (o == Outcome::Unbounded) {
    out.status = Status::Infeasible;
    out.values = Vector::Zero(p.n_variables());
    out.certificate = simplex.ray().head(m);
  } else {
    out.status = o == Outcome::Optimal ? Status::Optimal : Status::IterationLimit;
    out.values = recover();
    if (o == Outcome::Optimal) out.duals = simplex.values().head(m);
  }
  finish(p, out, feasibility_tol);
  return out;
}

}  // namespace

void Problem::validate() const {
  if (cost.size() < 1) throw Error(ErrorCode::InvalidArgument, "LP needs at least one variable");
  if (constraints.rows() != rhs.size() || constraints.cols() != cost.size())
    throw Error(ErrorCode::DimensionMismatch,
                "constraint matrix is " + std::to_string(constraints.rows()) + "x" +
                    std::to_string(constraints.cols()) + ", expected " + std::to_string(rhs.size()) + "x" +
                    std::to_string(cost.size()));
  if (!cost.allFinite() || !constraints.allFinite() || !rhs.allFinite())
    throw Error(ErrorCode::InvalidArgument, "LP data must be finite");
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Unbounded: return "unbounded";
    case Status::Infeasible: return "infeasible";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

Solution solve(const Problem& problem, const Options& options) {
  problem.validate();
  const Resolved r = resolve(problem, options);
  Budget budget{0, r.max_iters, r.bland_after};

  Solution out;
  if (options.method == Method::Primal) {
    out = solve_primal(problem, r, budget, options.feasibility_tol);
  } else {
    const DualLayout layout = layout_dual(problem);
    bool dual_infeasible = layout.infeasible;
    if (!dual_infeasible) out = solve_dual(problem, layout, r, budget, options.feasibility_tol, dual_infeasible);
    if (dual_infeasible) {
      if (options.method == Method::Dual)
        throw Error(ErrorCode::InvalidArgument, "dual is infeasible; the primal method is required");
      out = solve_primal(problem, r, budget, options.feasibility_tol);
    }
  }
  out.iterations = budget.used;
  return out;
}

Verification verify(const Problem& problem, const Solution& solution, double tol) {
  problem.validate();
  if (solution.values.size() != problem.n_variables())
    throw Error(ErrorCode::DimensionMismatch, "solution length does not match the LP");
  Verification v;
  const Vector& x = solution.values;
  const Vector row_slack = problem.constraints * x - problem.rhs;
  for (Index i = 0; i < row_slack.size(); ++i) v.primal_violation = std::max(v.primal_violation, -row_slack(i));
  for (Index j = 0; j < x.size(); ++j) v.bound_violation = std::max(v.bound_violation, -x(j));

  v.has_duals = solution.duals.size() == problem.n_constraints();
  if (v.has_duals) {
    const Vector& y = solution.duals;
    const Vector reduced = problem.cost - problem.constraints.transpose() * y;
    double dual_violation = 0.0;
    double complementarity = 0.0;
    for (Index j = 0; j < reduced.size(); ++j) {
      dual_violation = std::max(dual_violation, -reduced(j));
      complementarity = std::max(complementarity, std::abs(x(j) * reduced(j)));
    }
    for (Index i = 0; i < y.size(); ++i) {
      dual_violation = std::max(dual_violation, -y(i));
      complementarity = std::max(complementarity, std::abs(y(i) * row_slack(i)));
    }
    v.dual_violation = dual_violation;
    v.complementarity = complementarity;
    const double primal_objective = problem.cost.dot(x);
    v.duality_gap =
        std::abs(primal_objective - problem.rhs.dot(y)) / std::max(1.0, std::abs(primal_objective));
  }
  v.passed = v.primal_violation <= tol && v.bound_violation <= tol && v.dual_violation <= tol &&
             v.complementarity <= tol && v.duality_gap <= tol;
  return v;
}

void write_listing(std::ostream& out, const Problem& problem) {
  const auto old = out.precision(17);
  out << "lp " << problem.n_variables() << ' ' << problem.n_constraints() << '\n' << "min";
  for (Index j = 0; j < problem.n_variables(); ++j) out << ' ' << problem.cost(j);
  out << '\n';
  for (Index i = 0; i < problem.n_constraints(); ++i) {
    out << "row " << i << ':';
    for (Index j = 0; j < problem.n_variables(); ++j) out << ' ' << problem.constraints(i, j);
    out << " >= " << problem.rhs(i) << '\n';
  }
  out.precision(old);
}

}  // namespace lmmk::lp

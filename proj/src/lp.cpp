#include "backcom/lp.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace backcom {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

void LpProblem::validate() const {
  const auto n = objective.size();
  if (a.cols() != n || a.rows() != b.size() || lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("LP dimensions are inconsistent");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(lower[j])) throw std::invalid_argument("LP lower bounds must be finite");
    if (!(lower[j] <= upper[j])) throw std::invalid_argument("LP bounds crossed");
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;

class BoundedSimplex {
 public:
  BoundedSimplex(Eigen::MatrixXd tableau, Eigen::VectorXd values, std::vector<int> basis, Eigen::VectorXd upper,
                 int max_pivots, double tol)
      : t_(std::move(tableau)),
        beta_(std::move(values)),
        basis_(std::move(basis)),
        upper_(std::move(upper)),
        at_upper_(t_.cols(), false),
        is_basic_(t_.cols(), false),
        max_pivots_(max_pivots),
        tol_(tol) {
    for (int v : basis_) is_basic_[v] = true;
  }

  // Runs primal simplex iterations for `cost` (maximization). Returns Optimal, Unbounded or IterationLimit.
  LpStatus optimize(const Eigen::VectorXd& cost) {
    const Eigen::Index m = t_.rows();
    const Eigen::Index ncols = t_.cols();
    while (true) {
      if (pivots_ >= max_pivots_) return LpStatus::IterationLimit;
      Eigen::VectorXd cb(m);
      for (Eigen::Index i = 0; i < m; ++i) cb[i] = cost[basis_[i]];
      int entering = -1;
      for (Eigen::Index j = 0; j < ncols; ++j) {
        if (is_basic_[j] || upper_[j] == 0.0) continue;
        const double d = cost[j] - cb.dot(t_.col(j));
        if ((!at_upper_[j] && d > tol_) || (at_upper_[j] && d < -tol_)) {
          entering = static_cast<int>(j);
          break;
        }
      }
      if (entering < 0) return LpStatus::Optimal;
      const double dir = at_upper_[entering] ? -1.0 : 1.0;

      double step = upper_[entering];
      int leave_row = -1;
      int leave_var = entering;
      bool leave_to_upper = false;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double alpha = dir * t_(i, entering);
        double limit = kInf;
        bool to_upper = false;
        if (alpha > kPivotTol) {
          limit = std::max(0.0, beta_[i]) / alpha;
        } else if (alpha < -kPivotTol && std::isfinite(upper_[basis_[i]])) {
          limit = std::max(0.0, upper_[basis_[i]] - beta_[i]) / -alpha;
          to_upper = true;
        } else {
          continue;
        }
        const double slack = std::isfinite(step) ? 1e-12 * std::max(1.0, step) : 0.0;
        if (limit < step - slack || (limit <= step + slack && basis_[i] < leave_var)) {
          step = limit;
          leave_row = static_cast<int>(i);
          leave_var = basis_[i];
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(step)) return LpStatus::Unbounded;

      const double start = at_upper_[entering] ? upper_[entering] : 0.0;
      for (Eigen::Index i = 0; i < m; ++i) beta_[i] -= dir * t_(i, entering) * step;
      ++pivots_;
      if (leave_row < 0) {
        at_upper_[entering] = !at_upper_[entering];
        continue;
      }
      pivot(leave_row, entering);
      beta_[leave_row] = start + dir * step;
      at_upper_[leave_var] = leave_to_upper;
    }
  }

  void pivot(int row, int col) {
    const int leaving = basis_[row];
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    is_basic_[leaving] = false;
    is_basic_[col] = true;
    at_upper_[col] = false;
    basis_[row] = col;
  }

  // Replaces artificial basics (value ~0) by structural or slack columns where possible.
  void expel(int first_artificial) {
    for (Eigen::Index r = 0; r < t_.rows(); ++r) {
      if (basis_[r] < first_artificial) continue;
      for (int j = 0; j < first_artificial; ++j) {
        if (is_basic_[j] || std::abs(t_(r, j)) <= 1e-9) continue;
        const double value = at_upper_[j] ? upper_[j] : 0.0;
        const int leaving = basis_[r];
        pivot(static_cast<int>(r), j);
        beta_[r] = value;
        at_upper_[leaving] = false;
        ++pivots_;
        break;
      }
    }
    for (Eigen::Index j = first_artificial; j < t_.cols(); ++j) upper_[j] = 0.0;
  }

  double value_of(int var) const {
    if (is_basic_[var]) {
      for (std::size_t i = 0; i < basis_.size(); ++i) {
        if (basis_[i] == var) return beta_[i];
      }
    }
    return at_upper_[var] ? upper_[var] : 0.0;
  }

  const std::vector<int>& basis() const { return basis_; }
  int pivots() const { return pivots_; }

 private:
  Eigen::MatrixXd t_;
  Eigen::VectorXd beta_;
  std::vector<int> basis_;
  Eigen::VectorXd upper_;
  std::vector<bool> at_upper_;
  std::vector<bool> is_basic_;
  int max_pivots_;
  double tol_;
  int pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, double tol) {
  problem.validate();
  const Eigen::Index n = problem.objective.size();
  const Eigen::Index m = problem.b.size();

  Eigen::VectorXd row_scale(m);
  Eigen::VectorXd sign(m);
  Eigen::VectorXd rhs(m);
  int artificials = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double big = m > 0 && n > 0 ? problem.a.row(i).cwiseAbs().maxCoeff() : 0.0;
    row_scale[i] = big > 0.0 ? 1.0 / big : 1.0;
    rhs[i] = row_scale[i] * (problem.b[i] - problem.a.row(i).dot(problem.lower));
    sign[i] = rhs[i] >= 0.0 ? 1.0 : -1.0;
    if (sign[i] < 0.0) ++artificials;
  }

  const Eigen::Index ncols = n + m + artificials;
  Eigen::MatrixXd tableau = Eigen::MatrixXd::Zero(m, ncols);
  Eigen::VectorXd values(m);
  std::vector<int> basis(m);
  Eigen::VectorXd upper(ncols);
  upper.head(n) = problem.upper - problem.lower;
  upper.tail(ncols - n).setConstant(kInf);
  int next_art = static_cast<int>(n + m);
  for (Eigen::Index i = 0; i < m; ++i) {
    tableau.row(i).head(n) = sign[i] * row_scale[i] * problem.a.row(i);
    tableau(i, n + i) = sign[i];
    values[i] = sign[i] * rhs[i];
    if (sign[i] < 0.0) {
      tableau(i, next_art) = 1.0;
      basis[i] = next_art++;
    } else {
      basis[i] = static_cast<int>(n + i);
    }
  }
  const Eigen::MatrixXd original = tableau;

  const int max_pivots = 200 * static_cast<int>(n + m) + 1000;
  BoundedSimplex simplex(tableau, values, basis, upper, max_pivots, tol);
  LpSolution sol;

  if (artificials > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(ncols);
    phase1.tail(artificials).setConstant(-1.0);
    const LpStatus s = simplex.optimize(phase1);
    if (s == LpStatus::IterationLimit) {
      sol.status = s;
      sol.pivots = simplex.pivots();
      return sol;
    }
    double infeasibility = 0.0;
    for (Eigen::Index j = n + m; j < ncols; ++j) infeasibility += simplex.value_of(static_cast<int>(j));
    if (infeasibility > 1e-9) {
      sol.status = LpStatus::Infeasible;
      sol.pivots = simplex.pivots();
      return sol;
    }
    simplex.expel(static_cast<int>(n + m));
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(ncols);
  cost.head(n) = problem.objective;
  sol.status = simplex.optimize(cost);
  sol.pivots = simplex.pivots();
  if (sol.status != LpStatus::Optimal) return sol;

  sol.x.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double v = problem.lower[j] + simplex.value_of(static_cast<int>(j));
    sol.x[j] = std::min(std::max(v, problem.lower[j]), problem.upper[j]);
  }
  sol.objective = problem.objective.dot(sol.x);

  // Row multipliers from the final basis: B' y = c_B on the scaled, sign-adjusted rows.
  sol.duals = Eigen::VectorXd::Zero(m);
  if (m > 0) {
    Eigen::MatrixXd basic_cols(m, m);
    Eigen::VectorXd cb(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      basic_cols.col(i) = original.col(simplex.basis()[i]);
      cb[i] = cost[simplex.basis()[i]];
    }
    const Eigen::VectorXd y = basic_cols.transpose().partialPivLu().solve(cb);
    for (Eigen::Index i = 0; i < m; ++i) sol.duals[i] = std::max(0.0, y[i] * sign[i] * row_scale[i]);
  }
  const Eigen::VectorXd reduced = problem.objective - problem.a.transpose() * sol.duals;
  double bound = problem.b.dot(sol.duals);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (reduced[j] > 0.0) {
      bound = std::isfinite(problem.upper[j]) ? bound + reduced[j] * problem.upper[j] : kInf;
    } else {
      bound += reduced[j] * problem.lower[j];
    }
  }
  sol.dual_bound = bound;
  return sol;
}

}  // namespace backcom

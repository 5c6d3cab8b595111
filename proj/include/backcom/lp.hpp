#pragma once

#include <Eigen/Core>

#include <string>

namespace backcom {

/// maximize c'x  subject to  A x <= b,  lower <= x <= upper.
/// Lower bounds must be finite; upper bounds may be +infinity.
struct LpProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// Throws std::invalid_argument on inconsistent dimensions or crossed bounds.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  Eigen::VectorXd x;
  double objective = 0.0;
  /// Nonnegative multipliers of the rows of A x <= b.
  Eigen::VectorXd duals;
  /// Objective of the dual LP at `duals` (upper bound on the primal optimum; +inf if not certifiable).
  double dual_bound = 0.0;
  int pivots = 0;
};

/// Bounded-variable primal simplex (two phases, dense tableau, Bland's anti-cycling rule).
LpSolution solve_lp(const LpProblem& problem, double tol = 1e-10);

}  // namespace backcom

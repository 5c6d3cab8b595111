#pragma once

#include <Eigen/Core>

#include <functional>

namespace backcom {

struct DualState {
  Eigen::VectorXd multipliers;
  double step = 0.01;
  int iteration = 0;
};

/// Maps multipliers to the Lagrangian maximizer (primal point).
using PrimalMap = std::function<Eigen::VectorXd(const DualState&)>;
/// Maps a primal point to constraint residuals r (feasible iff r >= 0).
using ResidualMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct DualAscentResult {
  DualState state;
  Eigen::VectorXd primal;
  Eigen::VectorXd residuals;
  /// max(max_n |r_n * nu_n|, max_n max(-r_n, 0)) at the returned point.
  double measure = 0.0;
  bool converged = false;
};

/// Projected subgradient iteration nu <- max(nu - step * r, 0) on the dual of a problem whose
/// constraints read r(x) >= 0. Stops once complementary slackness and primal feasibility both hold
/// to `tol`; `converged` is false when max_iters is exhausted first.
DualAscentResult subgradient_dual_ascent(const PrimalMap& primal_map, const ResidualMap& residual_map,
                                         DualState state, int max_iters = 5000, double tol = 1e-7);

}  // namespace backcom

#include "backcom/dual_ascent.hpp"

#include <stdexcept>

namespace backcom {

namespace {

double slackness_measure(const Eigen::VectorXd& residuals, const Eigen::VectorXd& nu) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < residuals.size(); ++i) {
    worst = std::max(worst, std::abs(residuals[i] * nu[i]));
    worst = std::max(worst, -residuals[i]);
  }
  return worst;
}

}  // namespace

DualAscentResult subgradient_dual_ascent(const PrimalMap& primal_map, const ResidualMap& residual_map,
                                         DualState state, int max_iters, double tol) {
  if (!(state.step > 0.0)) throw std::invalid_argument("dual step size must be positive");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
  state.multipliers = state.multipliers.cwiseMax(0.0);

  DualAscentResult out;
  for (int k = 0;; ++k) {
    out.primal = primal_map(state);
    out.residuals = residual_map(out.primal);
    if (out.residuals.size() != state.multipliers.size()) {
      throw std::invalid_argument("residual and multiplier dimensions differ");
    }
    out.measure = slackness_measure(out.residuals, state.multipliers);
    if (out.measure < tol) {
      out.converged = true;
      break;
    }
    if (k >= max_iters) break;
    state.multipliers = (state.multipliers - state.step * out.residuals).cwiseMax(0.0);
    ++state.iteration;
  }
  out.state = state;
  return out;
}

}  // namespace backcom

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "backcom/dual_ascent.hpp"

#include <algorithm>
#include <cmath>

using namespace backcom;

namespace {

// maximize sum_i log(1 + x_i) subject to sum_i x_i <= budget, 0 <= x_i <= 10.
// Lagrangian maximizer: x_i = clip(1 / nu - 1, 0, 10).
struct WaterFilling {
  int n;
  double budget;

  Eigen::VectorXd primal(const DualState& s) const {
    const double nu = s.multipliers[0];
    const double x = nu <= 0.0 ? 10.0 : std::clamp(1.0 / nu - 1.0, 0.0, 10.0);
    return Eigen::VectorXd::Constant(n, x);
  }
  Eigen::VectorXd residual(const Eigen::VectorXd& x) const { return Eigen::VectorXd::Constant(1, budget - x.sum()); }
};

}  // namespace

TEST_CASE("water filling converges to the hand-derived optimum") {
  const WaterFilling wf{2, 2.0};
  DualState s;
  s.multipliers = Eigen::VectorXd::Constant(1, 1.0);
  const DualAscentResult r = subgradient_dual_ascent([&](const DualState& d) { return wf.primal(d); },
                                                     [&](const Eigen::VectorXd& x) { return wf.residual(x); }, s);
  CHECK(r.converged);
  CHECK(r.measure < 1e-7);
  // Stationarity 1 / (1 + x) = nu with x = budget / n = 1 gives nu = 0.5.
  CHECK(r.state.multipliers[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.primal[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.state.iteration > 0);
}

TEST_CASE("slack constraint stops at zero multipliers") {
  const WaterFilling wf{2, 50.0};
  DualState s;
  s.multipliers = Eigen::VectorXd::Zero(1);
  const DualAscentResult r = subgradient_dual_ascent([&](const DualState& d) { return wf.primal(d); },
                                                     [&](const Eigen::VectorXd& x) { return wf.residual(x); }, s);
  CHECK(r.converged);
  CHECK(r.state.iteration == 0);
  CHECK(r.primal[0] == 10.0);
}

TEST_CASE("multipliers stay nonnegative") {
  const WaterFilling wf{3, 12.0};
  DualState s;
  s.multipliers = Eigen::VectorXd::Constant(1, 0.05);
  s.step = 0.5;
  const DualAscentResult r = subgradient_dual_ascent(
      [&](const DualState& d) {
        CHECK(d.multipliers[0] >= 0.0);
        return wf.primal(d);
      },
      [&](const Eigen::VectorXd& x) { return wf.residual(x); }, s, 50);
  CHECK(r.state.multipliers[0] >= 0.0);
}

TEST_CASE("nonsmooth dual is flagged as not converged") {
  // maximize x subject to x <= 0.5 on [0, 1]: the Lagrangian maximizer jumps between 0 and 1.
  DualState s;
  s.multipliers = Eigen::VectorXd::Constant(1, 0.0);
  const DualAscentResult r = subgradient_dual_ascent(
      [](const DualState& d) { return Eigen::VectorXd::Constant(1, d.multipliers[0] < 1.0 ? 1.0 : 0.0); },
      [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, 0.5 - x[0]); }, s, 300);
  CHECK_FALSE(r.converged);
  CHECK(r.state.iteration == 300);
  CHECK(r.measure > 1e-3);
}

TEST_CASE("step must be positive") {
  DualState s;
  s.multipliers = Eigen::VectorXd::Zero(1);
  s.step = 0.0;
  CHECK_THROWS(subgradient_dual_ascent([](const DualState&) { return Eigen::VectorXd::Zero(1); },
                                       [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1); }, s));
}

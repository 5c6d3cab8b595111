#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "backcom/lp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

using namespace backcom;

namespace {

// Brute force over every basic solution: choose n tight constraints among the rows of A and the
// finite bounds, solve, keep the feasible ones. Only valid for bounded problems.
std::optional<double> vertex_enumeration(const LpProblem& lp) {
  const int n = static_cast<int>(lp.objective.size());
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (int i = 0; i < lp.a.rows(); ++i) {
    rows.push_back(lp.a.row(i).transpose());
    rhs.push_back(lp.b[i]);
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    rows.push_back(e);
    rhs.push_back(lp.lower[j]);
    if (std::isfinite(lp.upper[j])) {
      rows.push_back(e);
      rhs.push_back(lp.upper[j]);
    }
  }
  const int total = static_cast<int>(rows.size());
  std::optional<double> best;
  std::vector<int> pick(n);
  auto feasible = [&](const Eigen::VectorXd& x) {
    if (((lp.a * x - lp.b).array() > 1e-9).any()) return false;
    for (int j = 0; j < n; ++j) {
      if (x[j] < lp.lower[j] - 1e-9 || x[j] > lp.upper[j] + 1e-9) return false;
    }
    return true;
  };
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd m(n, n);
      Eigen::VectorXd r(n);
      for (int k = 0; k < n; ++k) {
        m.row(k) = rows[pick[k]].transpose();
        r[k] = rhs[pick[k]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(r);
      if (!feasible(x)) return;
      const double v = lp.objective.dot(x);
      if (!best || v > *best) best = v;
      return;
    }
    for (int i = start; i < total; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

LpProblem random_bounded_lp(std::mt19937_64& gen, int n, int m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LpProblem lp;
  lp.objective = Eigen::VectorXd::NullaryExpr(n, [&] { return u(gen); });
  lp.a = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return u(gen); });
  lp.b = Eigen::VectorXd::NullaryExpr(m, [&] { return u(gen) + 0.3; });
  lp.lower = Eigen::VectorXd::NullaryExpr(n, [&] { return -1.0 + 0.5 * u(gen); });
  lp.upper = lp.lower + Eigen::VectorXd::NullaryExpr(n, [&] { return 1.5 + u(gen); });
  return lp;
}

}  // namespace

TEST_CASE("textbook LP") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18, x, y >= 0: optimum 36 at (2, 6).
  LpProblem lp;
  lp.objective = Eigen::Vector2d(3, 5);
  lp.a.resize(3, 2);
  lp.a << 1, 0, 0, 2, 3, 2;
  lp.b = Eigen::Vector3d(4, 12, 18);
  lp.lower = Eigen::Vector2d::Zero();
  lp.upper = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(36.0));
  CHECK(s.x[0] == doctest::Approx(2.0));
  CHECK(s.x[1] == doctest::Approx(6.0));
  // Hand-derived duals: (0, 1.5, 1).
  CHECK(s.duals[0] == doctest::Approx(0.0));
  CHECK(s.duals[1] == doctest::Approx(1.5));
  CHECK(s.duals[2] == doctest::Approx(1.0));
  CHECK(s.dual_bound == doctest::Approx(36.0));
}

TEST_CASE("random bounded LPs agree with vertex enumeration") {
  std::mt19937_64 gen(2024);
  int optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const int m = 1 + trial % 4;
    const LpProblem lp = random_bounded_lp(gen, n, m);
    const std::optional<double> oracle = vertex_enumeration(lp);
    const LpSolution s = solve_lp(lp);
    if (!oracle) {
      CHECK(s.status == LpStatus::Infeasible);
      continue;
    }
    ++optimal;
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(*oracle).epsilon(1e-8).scale(1.0));
    CHECK(((lp.a * s.x - lp.b).array() <= 1e-9).all());
    CHECK((s.duals.array() >= -1e-12).all());
    CHECK(s.dual_bound >= s.objective - 1e-8);
    CHECK(s.dual_bound == doctest::Approx(s.objective).epsilon(1e-7).scale(1.0));
  }
  CHECK(optimal > 100);
}

TEST_CASE("negative right-hand sides need phase one") {
  // max x + y with x + y >= 1 (as -x - y <= -1), x <= 0.7, y <= 0.6, x, y >= 0: optimum 1.3.
  LpProblem lp;
  lp.objective = Eigen::Vector2d(1, 1);
  lp.a.resize(1, 2);
  lp.a << -1, -1;
  lp.b = Eigen::VectorXd::Constant(1, -1.0);
  lp.lower = Eigen::Vector2d::Zero();
  lp.upper = Eigen::Vector2d(0.7, 0.6);
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.3));
}

TEST_CASE("infeasible and unbounded problems are reported") {
  LpProblem infeasible;
  infeasible.objective = Eigen::VectorXd::Ones(1);
  infeasible.a = Eigen::MatrixXd::Constant(1, 1, -1.0);
  infeasible.b = Eigen::VectorXd::Constant(1, -2.0);
  infeasible.lower = Eigen::VectorXd::Zero(1);
  infeasible.upper = Eigen::VectorXd::Ones(1);
  CHECK(solve_lp(infeasible).status == LpStatus::Infeasible);

  LpProblem unbounded;
  unbounded.objective = Eigen::Vector2d(1, 0);
  unbounded.a.resize(1, 2);
  unbounded.a << 0, 1;
  unbounded.b = Eigen::VectorXd::Ones(1);
  unbounded.lower = Eigen::Vector2d::Zero();
  unbounded.upper = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  CHECK(solve_lp(unbounded).status == LpStatus::Unbounded);
}

TEST_CASE("degenerate cumulative rows") {
  // Prefix-sum constraints with zero slack on the first rows (the time-allocation structure).
  const int n = 6;
  LpProblem lp;
  lp.objective = Eigen::VectorXd::LinSpaced(n, 1.0, 0.5);
  lp.a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) lp.a.row(i).head(i + 1).setOnes();
  lp.b = Eigen::VectorXd::LinSpaced(n, 0.0, 2.5);
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Ones(n);
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  const std::optional<double> oracle = vertex_enumeration(lp);
  REQUIRE(oracle);
  CHECK(s.objective == doctest::Approx(*oracle).epsilon(1e-10));
}

TEST_CASE("validation of malformed problems") {
  LpProblem lp;
  lp.objective = Eigen::Vector2d(1, 1);
  lp.a = Eigen::MatrixXd::Ones(1, 3);
  lp.b = Eigen::VectorXd::Ones(1);
  lp.lower = Eigen::Vector2d::Zero();
  lp.upper = Eigen::Vector2d::Ones();
  CHECK_THROWS(solve_lp(lp));
  lp.a = Eigen::MatrixXd::Ones(1, 2);
  lp.upper = Eigen::Vector2d(-1, 1);
  CHECK_THROWS(solve_lp(lp));
}

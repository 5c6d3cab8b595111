#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "backcom/protocol_tb.hpp"
#include "backcom/sca_bounds.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace backcom;

namespace {

double min_horizontal_distance(const Trajectory& traj, const Position& w) {
  double best = std::numeric_limits<double>::infinity();
  for (const Position& q : traj.points) best = std::min(best, (q - w).norm());
  return best;
}

}  // namespace

TEST_CASE("block gains follow the rate and harvest expressions") {
  const ScenarioParams p = default_scenario(Protocol::TB, 2.0);
  const Trajectory line = straight_line(p);
  const BlockGains g = tb_block_gains(p, line);
  const TbLinkConstants c = tb_link_constants(p);
  REQUIRE(static_cast<int>(g.size()) == p.n_slots / 2);
  for (int b = 0; b < static_cast<int>(g.size()); ++b) {
    const Position& q = line.points[2 * b + 1];
    CHECK(std::log2(1.0 + g.snr[b] * 0.3) == doctest::Approx(tb_rate_approx(p, c, q, 0.3)).epsilon(1e-14));
    CHECK(g.harvest[b] * 0.7 == doctest::Approx(harvested_energy(p, 0.3, path_gain(p, q, p.w_b))).epsilon(1e-14));
  }
}

TEST_CASE("surrogate bounds hold globally and are tight at the expansion point") {
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ScenarioParams p = default_scenario(Protocol::TB, 2.0);
  const TbLinkConstants c = tb_link_constants(p);
  const double h2 = p.altitude_h * p.altitude_h;
  for (int trial = 0; trial < 1000; ++trial) {
    const Position q(40.0 * u(gen) - 10.0, 30.0 * u(gen) - 10.0);
    const double a_l = u(gen);
    const double a = u(gen);
    const TbScaBound up = tb_reflection_bound(p, c, q, a_l);
    CHECK(up(a) >= tb_rate_approx(p, c, q, a) - 1e-15);
    CHECK(std::abs(up(a_l) - tb_rate_approx(p, c, q, a_l)) <= 1e-10);

    const double u_l = 400.0 * u(gen);
    const double uu = 400.0 * u(gen);
    const double exact_rate = std::log2(1.0 + c.w_br * a / (uu + h2));
    const TbScaBound lo = tb_trajectory_rate_bound(p, c, a, u_l);
    CHECK(lo(uu) <= exact_rate + 1e-15);
    CHECK(std::abs(lo(u_l) - std::log2(1.0 + c.w_br * a / (u_l + h2))) <= 1e-10);

    const ScaBound gain = gain_lower_bound(p, u_l);
    CHECK(gain(uu) <= p.beta0 / (uu + h2) * (1.0 + 1e-13));
    CHECK(std::abs(gain(u_l) - p.beta0 / (u_l + h2)) <= 1e-10 * p.beta0);
  }
}

TEST_CASE("surrogate solve is a lower bound that starts tight") {
  for (double mu : {0.0, 1e-3}) {
    ScenarioParams p = default_scenario(Protocol::TB, 2.0);
    p.mu = mu;
    const Trajectory line = straight_line(p);
    const int blocks = p.block_count();
    std::vector<double> a(blocks, 0.5);
    const BlockGains g = tb_block_gains(p, line);
    const std::vector<double> phi = tb_time_allocation(p, line, a);
    const double start = schedule_objective(g, a, phi);
    const TbSurrogateSolution s = tb_trajectory_surrogate(p, a, phi, line);
    CHECK(s.status == ScpStatus::Optimal);
    CHECK(s.objective_at_start == doctest::Approx(start).epsilon(1e-10));
    CHECK(s.objective >= s.objective_at_start);
    const double exact = schedule_objective(tb_block_gains(p, s.trajectory), a, phi);
    CHECK(exact >= s.objective - 1e-12);
    if (mu > 0.0) {
      // Each slack underestimates the squared distance and respects its linearized upper bound.
      int idx = 0;
      for (int b = 0; b < blocks; ++b) {
        if (!(phi[b] > 0.0 && a[b] > 0.0)) continue;
        const Position& q = s.trajectory.points[2 * b + 1];
        const Position& ql = line.points[2 * b + 1];
        const double linear = (ql - p.w_b).squaredNorm() + 2.0 * (ql - p.w_b).dot(q - ql);
        const double y = s.slack_y[idx++];
        CHECK(y <= (q - p.w_b).squaredNorm() + 1e-6);
        CHECK(y <= linear + SolveConfig{}.relax * p.altitude_h * p.altitude_h + 1e-9);
        CHECK(y >= -0.5 * p.altitude_h * p.altitude_h);
      }
    }
  }
}

TEST_CASE("trajectory update never lowers the objective and stays feasible") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const ScenarioParams p = testing::random_scenario(seed, Protocol::TB, 24);
    const Trajectory line = straight_line(p);
    std::vector<double> a(p.block_count(), 0.5);
    const std::vector<double> phi = tb_time_allocation(p, line, a);
    const double before = schedule_objective(tb_block_gains(p, line), a, phi);
    const Trajectory next = tb_trajectory(p, a, phi, line);
    CHECK(check_mobility(p, next).feasible);
    CHECK(energy_feasible(p, tb_block_gains(p, next), a, phi, EnergyRule::Cumulative));
    CHECK(schedule_objective(tb_block_gains(p, next), a, phi) >= before);
    CHECK((next.points.front() - p.q_init).norm() == 0.0);
    CHECK((next.points.back() - p.q_final).norm() == 0.0);
  }
}

TEST_CASE("default scenario: converges, hovers above the BD, flies at full speed in transit") {
  const ScenarioParams p = default_scenario(Protocol::TB, 2.0);
  const SolveReport r = tb_bcd_solve(p);
  CHECK(r.status == SolveStatus::Converged);
  CHECK(r.iterations <= 30);
  CHECK(testing::nondecreasing(r.objective_history, 1e-9));
  CHECK(r.objective() > r.objective_history.front());
  CHECK(min_horizontal_distance(r.trajectory, p.w_b) < 0.5);
  CHECK(r.mobility_violation <= kFeasibilityTol);
  for (double res : r.energy_residuals) CHECK(res >= -kFeasibilityTol);
  double fastest = 0.0;
  for (std::size_t k = 0; k + 1 < r.trajectory.points.size(); ++k) {
    fastest = std::max(fastest, (r.trajectory.points[k + 1] - r.trajectory.points[k]).norm() / p.delta);
  }
  CHECK(fastest >= 0.99 * p.v_max);
  CHECK(fastest <= p.v_max * (1.0 + 1e-9));
}

TEST_CASE("objective history is monotone on random scenarios") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const ScenarioParams p = testing::random_scenario(seed, Protocol::TB, 24);
    const SolveReport r = tb_bcd_solve(p);
    INFO("seed " << seed);
    CHECK(testing::nondecreasing(r.objective_history, 1e-9));
    CHECK(r.mobility_violation <= kFeasibilityTol);
    for (double res : r.energy_residuals) CHECK(res >= -kFeasibilityTol);
  }
}

TEST_CASE("a trip that needs full speed keeps the straight line") {
  ScenarioParams p = default_scenario(Protocol::TB, 2.0);
  p.q_final = p.q_init + Position(p.v_max * p.period_t, 0.0);
  p.w_b = Position(20.0, 5.0);
  const SolveReport r = tb_bcd_solve(p);
  const Trajectory line = straight_line(p);
  for (std::size_t k = 0; k < line.points.size(); ++k) {
    CHECK((r.trajectory.points[k] - line.points[k]).norm() <= 1e-12);
  }
}

TEST_CASE("per-block energy rule keeps every block self-powered") {
  const ScenarioParams p = default_scenario(Protocol::TB, 2.0);
  SolveConfig c;
  c.energy_rule = EnergyRule::PerSlot;
  const SolveReport r = tb_bcd_solve(p, c);
  const std::vector<double> per_block =
      check_energy_feasibility(p, r.trajectory, r.schedule, r.rates, EnergyRule::PerSlot);
  for (double res : per_block) CHECK(res >= -kFeasibilityTol);
}

TEST_CASE("dynamic circuit cannot beat the static model from the same start when it draws more") {
  ScenarioParams p = default_scenario(Protocol::TB, 2.0);
  const double static_value = tb_bcd_solve(p).objective();
  p.mu = 0.01;
  const double dynamic_value = tb_bcd_solve(p).objective();
  CHECK(dynamic_value <= static_value + 1e-12);
}

TEST_CASE("solver rejects a mismatched protocol") {
  const ScenarioParams p = default_scenario(Protocol::TBR, 3.0);
  CHECK_THROWS_AS(tb_bcd_solve(p), ConfigError);
}

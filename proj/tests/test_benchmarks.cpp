#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "backcom/benchmarks.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace backcom;

TEST_CASE("scheme and axis names round-trip") {
  for (Scheme s : {Scheme::Proposed, Scheme::HF, Scheme::SF}) CHECK(scheme_from_string(to_string(s)) == s);
  for (SweepAxis a : {SweepAxis::Period, SweepAxis::Mu, SweepAxis::Snr}) CHECK(sweep_axis_from_string(to_string(a)) == a);
  CHECK_THROWS_AS(scheme_from_string("best"), ConfigError);
  CHECK_THROWS_AS(sweep_axis_from_string("K"), ConfigError);
}

TEST_CASE("sweep axes change exactly one quantity") {
  const ScenarioParams base = default_scenario(Protocol::TB, 2.0);
  const ScenarioParams t = apply_axis(base, SweepAxis::Period, 3.0);
  CHECK(t.period_t == 3.0);
  CHECK(t.n_slots % 2 == 0);
  CHECK(t.delta * t.n_slots == doctest::Approx(3.0));
  CHECK(apply_axis(base, SweepAxis::Mu, 1e-3).mu == 1e-3);
  const ScenarioParams s = apply_axis(base, SweepAxis::Snr, 60.0);
  CHECK(s.sigma_r2 == doctest::Approx(1e-9));
  CHECK(s.sigma_u2 == doctest::Approx(1e-9));
  CHECK_THROWS_AS(apply_axis(base, SweepAxis::Mu, -1.0), ConfigError);
}

TEST_CASE("straight-flight scheme keeps the constant-speed line") {
  for (Protocol proto : {Protocol::TB, Protocol::TBR}) {
    const ScenarioParams p = default_scenario(proto, proto == Protocol::TB ? 2.0 : 3.0);
    const SolveReport r = solve_sf(p);
    const Trajectory line = straight_line(p);
    for (std::size_t k = 0; k < line.points.size(); ++k) CHECK((r.trajectory.points[k] - line.points[k]).norm() == 0.0);
    CHECK(r.scheme == "sf");
  }
}

TEST_CASE("harvest-first scheme spends only what each block harvests") {
  const ScenarioParams p = default_scenario(Protocol::TB, 2.0);
  const SolveReport r = solve_hf(p);
  const std::vector<double> per_block =
      check_energy_feasibility(p, r.trajectory, r.schedule, r.rates, EnergyRule::PerSlot);
  for (double res : per_block) CHECK(res >= -kFeasibilityTol * p.p_c);
  for (std::size_t b = 0; b < r.schedule.phi.size(); ++b) {
    const double theta = path_gain(p, r.trajectory.points[2 * b + 1], p.w_b);
    CHECK(r.schedule.phi[b] <= harvested_energy(p, r.schedule.a[b], theta) / p.p_c * (1.0 + 1e-9) + 1e-15);
  }
}

TEST_CASE("ordering proposed >= harvest-first >= straight flight on the default scenarios") {
  for (Protocol proto : {Protocol::TB, Protocol::TBR}) {
    const ScenarioParams p = default_scenario(proto, proto == Protocol::TB ? 2.0 : 3.0);
    const SchemeComparison c = compare_schemes(p);
    INFO(to_string(proto));
    CHECK(c.proposed.objective() >= c.hf.objective() - 1e-6);
    CHECK(c.hf.objective() >= c.sf.objective() - 1e-6);
    CHECK(c.proposed_from_hf.objective() >= c.hf.objective() - 1e-9);
    CHECK(c.proposed_from_sf.objective() >= c.sf.objective() - 1e-9);
    CHECK(c.proposed.objective() >= c.proposed_from_hf.objective());
    CHECK(c.proposed.objective() >= c.proposed_from_sf.objective());
  }
}

TEST_CASE("mu sweep is non-increasing and labels the circuit model") {
  const ScenarioParams base = default_scenario(Protocol::TB, 2.0);
  const std::vector<double> mus = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
  const std::vector<SweepRow> rows = sweep(base, SweepAxis::Mu, mus, {Scheme::Proposed});
  REQUIRE(rows.size() == mus.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].axis_value == mus[i]);
    CHECK(rows[i].mu_model == "dynamic");
    CHECK(rows[i].status.rfind("error", 0) != 0);
    if (i > 0) CHECK(rows[i].objective <= rows[i - 1].objective + 1e-12);
  }
}

TEST_CASE("sweep table layout and failure reporting") {
  const ScenarioParams base = default_scenario(Protocol::TB, 2.0);
  CHECK(sweep(base, SweepAxis::Period, {2.0, 3.0}, {}).empty());
  const std::vector<SweepRow> rows = sweep(base, SweepAxis::Mu, {0.0, -1.0}, {Scheme::SF, Scheme::HF});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].scheme == Scheme::SF);
  CHECK(rows[1].scheme == Scheme::HF);
  CHECK(rows[0].mu_model == "static");
  CHECK(rows[2].status.rfind("error: ", 0) == 0);
  CHECK(rows[3].status.rfind("error: ", 0) == 0);
  const std::vector<SweepRow> slow = sweep(base, SweepAxis::Period, {2.0}, {Scheme::SF}, {}, 0.0);
  CHECK(slow[0].status.find(";over_budget") != std::string::npos);
}

TEST_CASE("rate checks: error and sigma bands") {
  RateCheck c{"x", 0.0, 1.1, 1.0, 0.05};
  CHECK(c.relative_error() == doctest::Approx(0.1));
  CHECK(c.within_sigma(3.0));
  CHECK_FALSE(c.within_sigma(1.0));
  RateCheck zero{"x", 0.0, 0.0, 0.0, 0.0};
  CHECK(zero.relative_error() == 0.0);
}

TEST_CASE("TB validation produces one point per noise level with a small MC error") {
  const std::vector<RateCheck> checks = validate_tb_rates(tb_rate_validation_scenario(), {-40.0, -60.0}, {}, 2000, 7);
  REQUIRE(checks.size() == 2);
  for (const RateCheck& c : checks) {
    CHECK(c.series == "tb_throughput");
    CHECK(c.approximation > 0.0);
    CHECK(c.mc_mean > 0.0);
    CHECK(c.mc_std_error < c.mc_mean);
  }
  CHECK(checks[1].approximation > checks[0].approximation);
}

TEST_CASE("TBR validation produces uplink and relay series per block, reproducibly") {
  ScenarioParams p = default_scenario(Protocol::TBR, 3.0);
  const SolveReport r = solve_sf(p);
  const std::vector<RateCheck> a = validate_tbr_rates(p, r, 500, 11);
  const std::vector<RateCheck> b = validate_tbr_rates(p, r, 500, 11);
  REQUIRE(a.size() == 2 * static_cast<std::size_t>(p.block_count()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].series == (i % 2 == 0 ? "tbr_uplink" : "tbr_downlink"));
    CHECK(a[i].mc_mean == b[i].mc_mean);
  }
  CHECK_THROWS_AS(validate_tbr_rates(default_scenario(Protocol::TB, 2.0), r, 10, 1), ConfigError);
}

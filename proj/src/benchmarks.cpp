#include "backcom/benchmarks.hpp"

#include "backcom/protocol_tb.hpp"
#include "backcom/protocol_tbr.hpp"
#include "backcom/rate_models.hpp"
#include "backcom/rng.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numeric>

namespace backcom {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Proposed: return "proposed";
    case Scheme::HF: return "hf";
    case Scheme::SF: return "sf";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& text) {
  if (text == "proposed") return Scheme::Proposed;
  if (text == "hf") return Scheme::HF;
  if (text == "sf") return Scheme::SF;
  throw ConfigError("unknown scheme '" + text + "' (expected proposed, hf or sf)");
}

namespace {

SolveReport dispatch(const ScenarioParams& params, const SolveConfig& config) {
  return params.protocol == Protocol::TB ? tb_bcd_solve(params, config) : tbr_bcd_solve(params, config);
}

}  // namespace

SolveReport solve_proposed(const ScenarioParams& params, SolveConfig config) {
  config.energy_rule = EnergyRule::Cumulative;
  config.optimize_trajectory = true;
  SolveReport report = dispatch(params, config);
  report.scheme = to_string(Scheme::Proposed);
  return report;
}

SolveReport solve_hf(const ScenarioParams& params, SolveConfig config) {
  config.energy_rule = EnergyRule::PerSlot;
  config.optimize_trajectory = true;
  SolveReport report = dispatch(params, config);
  report.scheme = to_string(Scheme::HF);
  const std::vector<double> cumulative =
      check_energy_feasibility(params, report.trajectory, report.schedule, report.rates, EnergyRule::Cumulative);
  for (double r : cumulative) {
    if (r < -kFeasibilityTol * params.p_c) throw SolverError("per-block solution violates the cumulative constraint");
  }
  return report;
}

SolveReport solve_sf(const ScenarioParams& params, SolveConfig config) {
  config.energy_rule = EnergyRule::Cumulative;
  config.optimize_trajectory = false;
  if (config.initial) config.initial->trajectory = straight_line(params);
  SolveReport report = dispatch(params, config);
  report.scheme = to_string(Scheme::SF);
  return report;
}

SolveReport solve_scheme(const ScenarioParams& params, Scheme scheme, const SolveConfig& config) {
  switch (scheme) {
    case Scheme::Proposed: return solve_proposed(params, config);
    case Scheme::HF: return solve_hf(params, config);
    case Scheme::SF: return solve_sf(params, config);
  }
  throw ConfigError("unknown scheme");
}

SchemeComparison compare_schemes(const ScenarioParams& params, const SolveConfig& config) {
  SchemeComparison out;
  SolveConfig cold = config;
  cold.initial.reset();
  out.sf = solve_sf(params, cold);
  out.hf = solve_hf(params, cold);
  out.proposed = solve_proposed(params, cold);

  SolveConfig warm = cold;
  warm.initial = out.hf.as_initial_point();
  out.proposed_from_hf = solve_proposed(params, warm);
  warm.initial = out.sf.as_initial_point();
  out.proposed_from_sf = solve_proposed(params, warm);

  for (const SolveReport* r : {&out.proposed_from_hf, &out.proposed_from_sf}) {
    if (r->objective() > out.proposed.objective()) out.proposed = *r;
  }
  return out;
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Period: return "T";
    case SweepAxis::Mu: return "mu";
    case SweepAxis::Snr: return "snr";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string& text) {
  if (text == "T") return SweepAxis::Period;
  if (text == "mu") return SweepAxis::Mu;
  if (text == "snr") return SweepAxis::Snr;
  throw ConfigError("unknown sweep axis '" + text + "' (expected T, mu or snr)");
}

ScenarioParams apply_axis(const ScenarioParams& base, SweepAxis axis, double value) {
  ScenarioParams p = base;
  switch (axis) {
    case SweepAxis::Period:
      set_period(p, value);
      break;
    case SweepAxis::Mu:
      p.mu = value;
      break;
    case SweepAxis::Snr:
      p.sigma_r2 = p.beta0 / db_to_linear(value);
      p.sigma_u2 = p.sigma_r2;
      break;
  }
  p.validate();
  return p;
}

std::vector<SweepRow> sweep(const ScenarioParams& base, SweepAxis axis, const std::vector<double>& values,
                            const std::vector<Scheme>& schemes, const SolveConfig& config, double budget_ms) {
  std::vector<SweepRow> rows(values.size() * schemes.size());
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (axis == SweepAxis::Mu) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
  }

  for (std::size_t s = 0; s < schemes.size(); ++s) {
    std::optional<InitialPoint> chain;
    for (std::size_t i : order) {
      SweepRow& row = rows[i * schemes.size() + s];
      row.axis_value = values[i];
      row.scheme = schemes[s];
      row.protocol = base.protocol;
      const auto started = std::chrono::steady_clock::now();
      try {
        const ScenarioParams p = apply_axis(base, axis, values[i]);
        row.mu_model = p.static_circuit() ? "static" : "dynamic";
        SolveConfig c = config;
        if (axis == SweepAxis::Mu && chain && !p.static_circuit()) c.initial = chain;
        const SolveReport report = solve_scheme(p, schemes[s], c);
        row.objective = report.objective();
        row.iterations = report.iterations;
        row.status = to_string(report.status);
        if (!p.static_circuit()) chain = report.as_initial_point();
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
        if (row.mu_model.empty()) row.mu_model = base.mu == 0.0 ? "static" : "dynamic";
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
      if (row.wall_ms > budget_ms) row.status += ";over_budget";
    }
  }
  return rows;
}

double RateCheck::relative_error() const {
  if (mc_mean == 0.0) return approximation == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(approximation - mc_mean) / std::abs(mc_mean);
}

bool RateCheck::within_sigma(double sigmas) const {
  return std::abs(approximation - mc_mean) <= sigmas * mc_std_error;
}

std::vector<double> default_noise_sweep_db() { return {-40.0, -50.0, -60.0, -70.0, -80.0, -90.0}; }

ScenarioParams tb_rate_validation_scenario() {
  ScenarioParams p = default_scenario(Protocol::TB, 2.0);
  p.mu = 0.01;
  p.rician_k = db_to_linear(15.0);
  return p;
}

ScenarioParams tbr_rate_validation_scenario() {
  ScenarioParams p = default_scenario(Protocol::TBR, 7.0);
  p.mu = 0.0;
  return p;
}

std::vector<RateCheck> validate_tb_rates(const ScenarioParams& base, const std::vector<double>& sigma_r2_db,
                                         const SolveConfig& config, std::int64_t samples, std::uint64_t seed) {
  if (base.protocol != Protocol::TB) throw ConfigError("TB rate validation needs a TB scenario");
  std::vector<RateCheck> out;
  for (std::size_t i = 0; i < sigma_r2_db.size(); ++i) {
    ScenarioParams p = base;
    p.sigma_r2 = db_to_linear(sigma_r2_db[i]);
    const SolveReport report = solve_proposed(p, config);
    RateCheck check;
    check.series = "tb_throughput";
    check.x = sigma_r2_db[i];
    check.approximation = report.objective();
    double var = 0.0;
    for (int b = 0; b < p.block_count(); ++b) {
      const double phi = report.schedule.phi[b];
      if (phi == 0.0) continue;
      const Position& q = report.trajectory.points[block_slots(Protocol::TB, b).backscatter];
      const McEstimate est = mc_expected_rate(p, RateKind::TbReceiver, q, report.schedule.a[b], samples,
                                              derive_seed(derive_seed(seed, i), static_cast<std::uint64_t>(b)));
      check.mc_mean += phi * est.mean;
      var += phi * phi * est.std_error * est.std_error;
    }
    check.mc_std_error = std::sqrt(var);
    out.push_back(check);
  }
  return out;
}

std::vector<RateCheck> validate_tbr_rates(const ScenarioParams& params, const SolveReport& solved,
                                          std::int64_t samples, std::uint64_t seed) {
  if (params.protocol != Protocol::TBR) throw ConfigError("TBR rate validation needs a TBR scenario");
  const std::vector<double> down = tbr_downlink_rates(params, solved.trajectory);
  std::vector<RateCheck> out;
  for (int b = 0; b < params.block_count(); ++b) {
    const BlockSlots slots = block_slots(Protocol::TBR, b);
    const double a = solved.schedule.a[b];
    const std::uint64_t block_seed = derive_seed(seed, static_cast<std::uint64_t>(b));

    RateCheck up;
    up.series = "tbr_uplink";
    up.x = b;
    up.approximation = tbr_uplink_rate_approx(params, solved.trajectory.points[slots.backscatter], a);
    const McEstimate up_mc = mc_tbr_uplink_rate(params, solved.trajectory.points[slots.harvest],
                                                solved.trajectory.points[slots.backscatter], a, samples,
                                                derive_seed(block_seed, 0));
    up.mc_mean = up_mc.mean;
    up.mc_std_error = up_mc.std_error;
    out.push_back(up);

    RateCheck relay;
    relay.series = "tbr_downlink";
    relay.x = b;
    relay.approximation = down[b];
    const McEstimate relay_mc = mc_expected_rate(params, RateKind::TbrDownlink, solved.trajectory.points[slots.relay],
                                                 1.0, samples, derive_seed(block_seed, 1));
    relay.mc_mean = relay_mc.mean;
    relay.mc_std_error = relay_mc.std_error;
    out.push_back(relay);
  }
  return out;
}

}  // namespace backcom

#include "bcd_driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace backcom {

void SolveConfig::validate() const {
  if (!(bcd_tol > 0.0) || !(sca_tol > 0.0) || !(scp_rel_tol > 0.0) || !(dual_tol > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (max_bcd_iters < 1 || max_sca_passes < 1 || dual_max_iters < 0) {
    throw std::invalid_argument("iteration limits must be positive");
  }
  if (!(initial_reflection >= 0.0 && initial_reflection <= 1.0)) {
    throw std::invalid_argument("initial reflection must lie in [0, 1]");
  }
  if (!(relax >= 0.0) || !(dual_step > 0.0)) throw std::invalid_argument("relax must be >= 0 and dual_step > 0");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::AuditFailed: return "audit_failed";
  }
  return "unknown";
}

namespace detail {

SolveReport run_bcd(const ScenarioParams& params, const SolveConfig& config, const ProtocolHooks& hooks) {
  const auto started = std::chrono::steady_clock::now();
  params.validate();
  config.validate();
  if (params.protocol != hooks.protocol) throw ConfigError("scenario protocol does not match the solver");
  const std::size_t blocks = static_cast<std::size_t>(params.block_count());
  const EnergyRule rule = config.energy_rule;

  Trajectory traj;
  std::vector<double> a(blocks, config.initial_reflection);
  std::vector<double> phi(blocks, 1.0);
  if (config.initial) {
    const InitialPoint& init = *config.initial;
    if (init.trajectory.points.size() != static_cast<std::size_t>(params.n_slots) + 1 ||
        init.schedule.a.size() != blocks || init.schedule.phi.size() != blocks) {
      throw std::invalid_argument("initial point does not match the scenario dimensions");
    }
    traj = init.trajectory;
    traj.points.front() = params.q_init;
    traj.points.back() = params.q_final;
    traj = repair_mobility(params, traj);
    for (std::size_t b = 0; b < blocks; ++b) {
      a[b] = std::clamp(init.schedule.a[b], 0.0, 1.0);
      phi[b] = std::clamp(init.schedule.phi[b], 0.0, 1.0);
    }
  } else {
    traj = straight_line(params);
  }
  BlockGains gains = hooks.gains(params, traj);
  if (!energy_feasible(params, gains, a, phi, rule)) phi = scale_to_feasible(params, gains, a, phi, rule);

  SolveReport report;
  report.protocol = params.protocol;
  SolveDiagnostics& diag = report.diagnostics;
  double value = schedule_objective(gains, a, phi);
  report.objective_history.push_back(value);

  auto consider = [&](const BlockGains& g, const std::vector<double>& ca, const std::vector<double>& cphi) {
    if (!energy_feasible(params, g, ca, cphi, rule)) {
      ++diag.rejected_updates;
      return false;
    }
    const double v = schedule_objective(g, ca, cphi);
    if (v < value - 1e-12 * std::abs(value)) {
      ++diag.rejected_updates;
      return false;
    }
    value = v;
    return true;
  };

  report.status = SolveStatus::MaxIterations;
  for (int it = 1; it <= config.max_bcd_iters; ++it) {
    const double before = value;

    std::vector<double> cand_phi = time_allocation(params, gains, a, rule, &diag);
    if (consider(gains, a, cand_phi)) phi = std::move(cand_phi);

    std::vector<double> cand_a = reflection(params, gains, phi, a, config, &diag);
    if (consider(gains, cand_a, phi)) a = std::move(cand_a);

    if (config.optimize_trajectory) {
      Trajectory cand_traj = hooks.trajectory_step(params, a, phi, traj, config, &diag);
      BlockGains cand_gains = hooks.gains(params, cand_traj);
      if (!within_speed_limit(params, cand_traj)) {
        ++diag.rejected_updates;
      } else if (consider(cand_gains, a, phi)) {
        traj = std::move(cand_traj);
        gains = std::move(cand_gains);
      }
    }

    report.objective_history.push_back(value);
    report.iterations = it;
    const double increase = value - before;
    const double fraction = increase <= 0.0 ? 0.0 : increase / std::max(std::abs(before), 1e-300);
    if (fraction < config.bcd_tol) {
      report.status = SolveStatus::Converged;
      break;
    }
  }

  report.trajectory = traj;
  report.schedule = Schedule{params.protocol, a, phi};
  report.rates = block_rates(gains, a);
  report.energy_residuals = check_energy_feasibility(params, traj, report.schedule, report.rates);
  report.mobility_violation = check_mobility(params, traj).max_violation;
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace detail
}  // namespace backcom

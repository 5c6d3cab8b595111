#include "trajectory_common.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace backcom::detail {

void add_waypoint_distance(CompositeFunction& f, const Trajectory& expansion, int k, const Position& p, double coef) {
  const int v = position_var(k, expansion.n_slots());
  if (v < 0) {
    f.add_constant(coef * (expansion.points[k] - p).squaredNorm());
  } else {
    f.add_squared_distance(v, p, coef);
  }
}

void add_mobility_constraints(SmoothConvexProgram& program, const ScenarioParams& params, const Trajectory& expansion,
                              double relax) {
  const int n = expansion.n_slots();
  const double step2 = params.max_step() * params.max_step();
  for (int k = 0; k < n; ++k) {
    const int v0 = position_var(k, n);
    const int v1 = position_var(k + 1, n);
    auto g = std::make_shared<CompositeFunction>();
    g->add_constant(-1.0 - relax);
    if (v0 >= 0 && v1 >= 0) {
      g->add_squared_difference(v1, v0, 1.0 / step2);
    } else if (v0 >= 0) {
      g->add_squared_distance(v0, expansion.points[k + 1], 1.0 / step2);
    } else if (v1 >= 0) {
      g->add_squared_distance(v1, expansion.points[k], 1.0 / step2);
    } else {
      continue;
    }
    program.constraints.push_back(g);
  }
}

Trajectory decode_positions(const Eigen::VectorXd& x, const Trajectory& expansion) {
  Trajectory out = expansion;
  const int n = expansion.n_slots();
  for (int k = 1; k < n; ++k) {
    const int v = position_var(k, n);
    out.points[k] = Position(x[v], x[v + 1]);
  }
  return out;
}

Eigen::VectorXd encode_positions(const Trajectory& traj, int total_dimension) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(total_dimension);
  const int n = traj.n_slots();
  for (int k = 1; k < n; ++k) {
    const int v = position_var(k, n);
    x[v] = traj.points[k].x();
    x[v + 1] = traj.points[k].y();
  }
  return x;
}

bool within_speed_limit(const ScenarioParams& params, const Trajectory& traj) {
  const double step = params.max_step();
  for (std::size_t k = 0; k + 1 < traj.points.size(); ++k) {
    if ((traj.points[k + 1] - traj.points[k]).norm() > step) return false;
  }
  return true;
}

Trajectory repair_mobility(const ScenarioParams& params, const Trajectory& candidate) {
  if (within_speed_limit(params, candidate)) return candidate;
  const Trajectory line = straight_line(params);
  auto mix = [&](double tau) {
    Trajectory t = candidate;
    for (std::size_t k = 1; k + 1 < t.points.size(); ++k) {
      t.points[k] = (1.0 - tau) * candidate.points[k] + tau * line.points[k];
    }
    return t;
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (within_speed_limit(params, mix(mid)) ? hi : lo) = mid;
  }
  return mix(hi);
}

bool straight_line_is_forced(const ScenarioParams& params) {
  return (params.q_final - params.q_init).norm() >= params.v_max * params.period_t * (1.0 - 1e-9);
}

Trajectory run_trajectory_sca(const ScenarioParams& params, const std::vector<double>& a,
                              const std::vector<double>& phi, const Trajectory& start, const SolveConfig& config,
                              const GainsFn& gains_fn, const SurrogateBuilder& build, SolveDiagnostics* diag) {
  if (straight_line_is_forced(params)) {
    const Trajectory line = straight_line(params);
    if (energy_feasible(params, gains_fn(params, line), a, phi, config.energy_rule)) return line;
    return start;
  }
  Trajectory current = start;
  double value = schedule_objective(gains_fn(params, current), a, phi);

  for (int pass = 0; pass < config.max_sca_passes; ++pass) {
    const SurrogateProgram surrogate = build(current);
    ScpOptions opt;
    opt.tol = config.scp_rel_tol * std::max(std::abs(value), 1e-12);
    const ScpResult res = solve_scp(surrogate.program, surrogate.x0, opt);
    if (diag) {
      ++diag->trajectory_sca_passes;
      diag->newton_steps += res.newton_steps;
      if (res.status != ScpStatus::Optimal) ++diag->inexact_solves;
    }
    if (res.status == ScpStatus::InfeasibleStart) {
      throw SolverError("trajectory surrogate pass " + std::to_string(pass + 1) + ": infeasible start");
    }
    Trajectory candidate = repair_mobility(params, decode_positions(res.x, current));
    if (!energy_feasible(params, gains_fn(params, candidate), a, phi, config.energy_rule)) {
      // Pull back toward the feasible expansion point; both ends satisfy the speed limits.
      auto mix = [&](double tau) {
        Trajectory t = current;
        for (std::size_t k = 1; k + 1 < t.points.size(); ++k) {
          t.points[k] = (1.0 - tau) * current.points[k] + tau * candidate.points[k];
        }
        return t;
      };
      double lo = 0.0;
      double hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (energy_feasible(params, gains_fn(params, mix(mid)), a, phi, config.energy_rule) ? lo : hi) = mid;
      }
      candidate = mix(lo);
      if (diag) ++diag->feasibility_repairs;
    }
    const double next = schedule_objective(gains_fn(params, candidate), a, phi);
    if (next < value) break;
    const double gain = (next - value) / std::max(std::abs(value), 1e-300);
    current = candidate;
    value = next;
    if (gain < config.sca_tol) break;
  }
  return current;
}

}  // namespace backcom::detail

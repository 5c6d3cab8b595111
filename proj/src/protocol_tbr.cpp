#include "backcom/protocol_tbr.hpp"

#include "backcom/sca_bounds.hpp"
#include "bcd_driver.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace backcom {

BlockGains tbr_block_gains(const ScenarioParams& params, const Trajectory& traj) {
  const int blocks = params.n_slots / 3;
  BlockGains g;
  g.snr.resize(blocks);
  g.harvest.resize(blocks);
  for (int b = 0; b < blocks; ++b) {
    const BlockSlots slots = block_slots(Protocol::TBR, b);
    const double theta_up = path_gain(params, traj.points[slots.backscatter], params.w_b);
    g.snr[b] = params.p_tx * theta_up * theta_up / params.sigma_u2;
    g.harvest[b] = params.eta * params.p_tx * path_gain(params, traj.points[slots.harvest], params.w_b);
  }
  return g;
}

std::vector<double> tbr_uplink_rates(const ScenarioParams& params, const Trajectory& traj,
                                     const std::vector<double>& a) {
  return block_rates(tbr_block_gains(params, traj), a);
}

std::vector<double> tbr_downlink_rates(const ScenarioParams& params, const Trajectory& traj) {
  const int blocks = params.n_slots / 3;
  std::vector<double> r(blocks);
  for (int b = 0; b < blocks; ++b) r[b] = tbr_downlink_rate_approx(params, traj.points[block_slots(Protocol::TBR, b).relay]);
  return r;
}

std::vector<double> tbr_time_allocation(const ScenarioParams& params, const Trajectory& traj,
                                        const std::vector<double>& a, EnergyRule rule) {
  return time_allocation(params, tbr_block_gains(params, traj), a, rule);
}

std::vector<double> tbr_reflection(const ScenarioParams& params, const Trajectory& traj,
                                   const std::vector<double>& phi, const std::vector<double>& a_current,
                                   const TbrSolveConfig& config) {
  return reflection(params, tbr_block_gains(params, traj), phi, a_current, config);
}

namespace {

struct TbrSurrogate {
  detail::SurrogateProgram surrogate;
  std::vector<int> t_var;
  std::vector<int> s_var;
};

TbrSurrogate build_tbr_surrogate(const ScenarioParams& params, const std::vector<double>& a,
                                 const std::vector<double>& phi, const Trajectory& expansion,
                                 const SolveConfig& config) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int n_slots = params.n_slots;
  const int blocks = n_slots / 3;
  const double h2 = params.altitude_h * params.altitude_h;
  const double eps = config.relax;
  const bool dynamic = !params.static_circuit();

  TbrSurrogate out;
  out.t_var.assign(blocks, -1);
  out.s_var.assign(blocks, -1);
  int dim = detail::position_var_count(n_slots);
  for (int b = 0; b < blocks; ++b) {
    if (phi[b] > 0.0 && a[b] > 0.0) out.t_var[b] = dim++;
  }
  for (int b = 0; b < blocks; ++b) {
    if (dynamic && out.t_var[b] >= 0) out.s_var[b] = dim++;
  }
  std::vector<double> u_h(blocks), u_u(blocks);
  for (int b = 0; b < blocks; ++b) {
    const BlockSlots slots = block_slots(Protocol::TBR, b);
    u_h[b] = (expansion.points[slots.harvest] - params.w_b).squaredNorm();
    u_u[b] = (expansion.points[slots.backscatter] - params.w_b).squaredNorm();
  }

  SmoothConvexProgram& program = out.surrogate.program;
  program.dimension = dim;
  program.lower = Eigen::VectorXd::Constant(dim, -kInf);
  program.upper = Eigen::VectorXd::Constant(dim, kInf);

  auto objective = std::make_shared<CompositeFunction>();
  const double reach = params.v_max * params.period_t;
  for (int b = 0; b < blocks; ++b) {
    if (out.t_var[b] < 0) continue;
    const double t_l = u_u[b] + h2;
    const ScaBound bound = tbr_uplink_distance_bound(params, a[b], t_l);
    objective->add_constant(phi[b] * (bound.value - bound.slope * t_l));
    objective->add_linear(out.t_var[b], phi[b] * bound.slope);

    auto tie = std::make_shared<CompositeFunction>();
    tie->add_constant(1.0 - eps);
    detail::add_waypoint_distance(*tie, expansion, block_slots(Protocol::TBR, b).backscatter, params.w_b, 1.0 / h2);
    tie->add_linear(out.t_var[b], -1.0 / h2);
    program.constraints.push_back(tie);
    const double far = std::sqrt(u_u[b]) + reach;
    program.upper[out.t_var[b]] = far * far + h2 + 1.0;
  }
  program.objective = objective;

  auto add_block = [&](CompositeFunction& g, int b) {
    const ScaBound gain = gain_lower_bound(params, u_h[b]);
    const double harvest = params.eta * (1.0 - a[b]) * params.p_tx / params.p_c;
    g.add_constant(-harvest * (gain.value - gain.slope * u_h[b]));
    detail::add_waypoint_distance(g, expansion, block_slots(Protocol::TBR, b).harvest, params.w_b,
                                  -harvest * gain.slope);
    if (!dynamic) {
      g.add_constant(phi[b]);
      return;
    }
    g.add_constant(phi[b] * params.p_eps / params.p_c);
    if (out.s_var[b] >= 0) {
      g.add_univariate(out.s_var[b], Profile::Log2OnePlusOverSquare, tbr_uplink_constant(params, a[b]), 0.0,
                       phi[b] * params.mu / params.p_c);
    }
  };
  for (int n = 0; n < blocks; ++n) {
    auto g = std::make_shared<CompositeFunction>();
    g->add_constant(-eps);
    const int first = config.energy_rule == EnergyRule::Cumulative ? 0 : n;
    for (int b = first; b <= n; ++b) add_block(*g, b);
    program.constraints.push_back(g);
  }
  detail::add_mobility_constraints(program, params, expansion, eps);

  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (int b = 0; b < blocks; ++b) {
    if (out.s_var[b] < 0) continue;
    const int k = block_slots(Protocol::TBR, b).backscatter;
    const int v = detail::position_var(k, n_slots);
    const Position grad = 2.0 * (expansion.points[k] - params.w_b);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
    row[out.s_var[b]] = 1.0;
    row[v] = -grad.x();
    row[v + 1] = -grad.y();
    rows.push_back(row);
    rhs.push_back(u_u[b] - grad.dot(expansion.points[k]) + h2 + eps * h2);
    program.lower[out.s_var[b]] = 0.5 * h2;
  }
  program.affine_a.resize(static_cast<Eigen::Index>(rows.size()), dim);
  program.affine_b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    program.affine_a.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    program.affine_b[static_cast<Eigen::Index>(r)] = rhs[r];
  }

  out.surrogate.x0 = detail::encode_positions(expansion, dim);
  for (int b = 0; b < blocks; ++b) {
    if (out.t_var[b] >= 0) out.surrogate.x0[out.t_var[b]] = u_u[b] + h2;
    if (out.s_var[b] >= 0) out.surrogate.x0[out.s_var[b]] = u_u[b] + h2;
  }
  return out;
}

}  // namespace

TbrSurrogateSolution tbr_trajectory_surrogate(const ScenarioParams& params, const std::vector<double>& a,
                                              const std::vector<double>& phi, const Trajectory& expansion,
                                              const TbrSolveConfig& config) {
  const TbrSurrogate built = build_tbr_surrogate(params, a, phi, expansion, config);
  const SmoothConvexProgram& program = built.surrogate.program;
  TbrSurrogateSolution out;
  out.objective_at_start = program.objective->value(built.surrogate.x0);
  ScpOptions opt;
  opt.tol = config.scp_rel_tol * std::max(std::abs(out.objective_at_start), 1e-12);
  const ScpResult res = solve_scp(program, built.surrogate.x0, opt);
  out.status = res.status;
  out.objective = res.objective;
  out.trajectory = detail::decode_positions(res.x, expansion);
  for (std::size_t b = 0; b < built.t_var.size(); ++b) {
    if (built.t_var[b] < 0) continue;
    out.slacks.blocks.push_back(static_cast<int>(b));
    out.slacks.t.push_back(res.x[built.t_var[b]]);
    out.slacks.s.push_back(built.s_var[b] >= 0 ? res.x[built.s_var[b]] : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

Trajectory tbr_trajectory(const ScenarioParams& params, const std::vector<double>& a, const std::vector<double>& phi,
                          const Trajectory& traj_prev, const TbrSolveConfig& config, SolveDiagnostics* diag) {
  return detail::run_trajectory_sca(
      params, a, phi, traj_prev, config, tbr_block_gains,
      [&](const Trajectory& expansion) { return build_tbr_surrogate(params, a, phi, expansion, config).surrogate; },
      diag);
}

std::vector<double> audit_information_causality(const ScenarioParams& params, const Trajectory& traj,
                                                const std::vector<double>& a, const std::vector<double>& phi) {
  const std::vector<double> up = tbr_uplink_rates(params, traj, a);
  const std::vector<double> down = tbr_downlink_rates(params, traj);
  if (phi.size() != up.size()) throw std::invalid_argument("schedule length does not match the trajectory");
  std::vector<double> margins(up.size());
  double relayed = 0.0;
  double received = 0.0;
  for (std::size_t b = 0; b < up.size(); ++b) {
    relayed += down[b];
    received += phi[b] * up[b];
    margins[b] = relayed - received;
  }
  return margins;
}

SolveReport tbr_bcd_solve(const ScenarioParams& params, const TbrSolveConfig& config) {
  detail::ProtocolHooks hooks{Protocol::TBR, tbr_block_gains,
                              [](const ScenarioParams& p, const std::vector<double>& a, const std::vector<double>& phi,
                                 const Trajectory& prev, const SolveConfig& c, SolveDiagnostics* d) {
                                return tbr_trajectory(p, a, phi, prev, c, d);
                              }};
  SolveReport report = detail::run_bcd(params, config, hooks);
  report.causality_margins =
      audit_information_causality(params, report.trajectory, report.schedule.a, report.schedule.phi);
  for (double m : report.causality_margins) {
    if (!(m > 0.0)) {
      report.status = SolveStatus::AuditFailed;
      break;
    }
  }
  return report;
}

}  // namespace backcom

#include "backcom/protocol_tb.hpp"

#include "backcom/sca_bounds.hpp"
#include "bcd_driver.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace backcom {

BlockGains tb_block_gains(const ScenarioParams& params, const Trajectory& traj) {
  const TbLinkConstants consts = tb_link_constants(params);
  const int blocks = params.n_slots / 2;
  const double h2 = params.altitude_h * params.altitude_h;
  BlockGains g;
  g.snr.resize(blocks);
  g.harvest.resize(blocks);
  for (int b = 0; b < blocks; ++b) {
    const Position& q = traj.points[block_slots(Protocol::TB, b).harvest];
    g.snr[b] = consts.w_br / ((q - params.w_b).squaredNorm() + h2);
    g.harvest[b] = params.eta * params.p_tx * path_gain(params, q, params.w_b);
  }
  return g;
}

std::vector<double> tb_rates(const ScenarioParams& params, const Trajectory& traj, const std::vector<double>& a) {
  return block_rates(tb_block_gains(params, traj), a);
}

std::vector<double> tb_time_allocation(const ScenarioParams& params, const Trajectory& traj,
                                       const std::vector<double>& a, EnergyRule rule) {
  return time_allocation(params, tb_block_gains(params, traj), a, rule);
}

std::vector<double> tb_reflection(const ScenarioParams& params, const Trajectory& traj, const std::vector<double>& phi,
                                  const std::vector<double>& a_current, const TbSolveConfig& config) {
  return reflection(params, tb_block_gains(params, traj), phi, a_current, config);
}

namespace {

struct TbSurrogate {
  detail::SurrogateProgram surrogate;
  std::vector<int> y_var;
};

TbSurrogate build_tb_surrogate(const ScenarioParams& params, const std::vector<double>& a,
                               const std::vector<double>& phi, const Trajectory& expansion,
                               const SolveConfig& config) {
  const TbLinkConstants consts = tb_link_constants(params);
  const int n_slots = params.n_slots;
  const int blocks = n_slots / 2;
  const int npos = detail::position_var_count(n_slots);
  const double h2 = params.altitude_h * params.altitude_h;
  const double eps = config.relax;
  const bool dynamic = !params.static_circuit();

  TbSurrogate out;
  out.y_var.assign(blocks, -1);
  int dim = npos;
  for (int b = 0; b < blocks; ++b) {
    if (dynamic && phi[b] > 0.0 && a[b] > 0.0) out.y_var[b] = dim++;
  }
  std::vector<double> u_l(blocks);
  for (int b = 0; b < blocks; ++b) {
    u_l[b] = (expansion.points[block_slots(Protocol::TB, b).harvest] - params.w_b).squaredNorm();
  }

  SmoothConvexProgram& program = out.surrogate.program;
  program.dimension = dim;
  program.lower = Eigen::VectorXd::Constant(dim, -std::numeric_limits<double>::infinity());
  program.upper = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::infinity());

  auto objective = std::make_shared<CompositeFunction>();
  for (int b = 0; b < blocks; ++b) {
    if (!(phi[b] > 0.0 && a[b] > 0.0)) continue;
    const ScaBound bound = tb_trajectory_rate_bound(params, consts, a[b], u_l[b]);
    objective->add_constant(phi[b] * (bound.value - bound.slope * u_l[b]));
    detail::add_waypoint_distance(*objective, expansion, block_slots(Protocol::TB, b).harvest, params.w_b,
                                  phi[b] * bound.slope);
  }
  program.objective = objective;

  auto add_block = [&](CompositeFunction& g, int b) {
    const int k = block_slots(Protocol::TB, b).harvest;
    const ScaBound gain = gain_lower_bound(params, u_l[b]);
    const double harvest = params.eta * (1.0 - a[b]) * params.p_tx / params.p_c;
    g.add_constant(-harvest * (gain.value - gain.slope * u_l[b]));
    detail::add_waypoint_distance(g, expansion, k, params.w_b, -harvest * gain.slope);
    if (!dynamic) {
      g.add_constant(phi[b]);
      return;
    }
    g.add_constant(phi[b] * params.p_eps / params.p_c);
    if (out.y_var[b] >= 0) {
      g.add_univariate(out.y_var[b], Profile::Log2OnePlusOverShift, consts.w_br * a[b], h2,
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
    if (out.y_var[b] < 0) continue;
    const int k = block_slots(Protocol::TB, b).harvest;
    const int v = detail::position_var(k, n_slots);
    const Position grad = 2.0 * (expansion.points[k] - params.w_b);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
    row[out.y_var[b]] = 1.0;
    row[v] = -grad.x();
    row[v + 1] = -grad.y();
    rows.push_back(row);
    rhs.push_back(u_l[b] - grad.dot(expansion.points[k]) + eps * h2);
    program.lower[out.y_var[b]] = -0.5 * h2;
  }
  program.affine_a.resize(static_cast<Eigen::Index>(rows.size()), dim);
  program.affine_b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    program.affine_a.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    program.affine_b[static_cast<Eigen::Index>(r)] = rhs[r];
  }

  out.surrogate.x0 = detail::encode_positions(expansion, dim);
  for (int b = 0; b < blocks; ++b) {
    if (out.y_var[b] >= 0) out.surrogate.x0[out.y_var[b]] = u_l[b];
  }
  return out;
}

}  // namespace

TbSurrogateSolution tb_trajectory_surrogate(const ScenarioParams& params, const std::vector<double>& a,
                                            const std::vector<double>& phi, const Trajectory& expansion,
                                            const TbSolveConfig& config) {
  const TbSurrogate built = build_tb_surrogate(params, a, phi, expansion, config);
  const SmoothConvexProgram& program = built.surrogate.program;
  TbSurrogateSolution out;
  out.objective_at_start = program.objective->value(built.surrogate.x0);
  ScpOptions opt;
  opt.tol = config.scp_rel_tol * std::max(std::abs(out.objective_at_start), 1e-12);
  const ScpResult res = solve_scp(program, built.surrogate.x0, opt);
  out.status = res.status;
  out.objective = res.objective;
  out.trajectory = detail::decode_positions(res.x, expansion);
  for (int v : built.y_var) {
    if (v >= 0) out.slack_y.push_back(res.x[v]);
  }
  return out;
}

Trajectory tb_trajectory(const ScenarioParams& params, const std::vector<double>& a, const std::vector<double>& phi,
                         const Trajectory& traj_prev, const TbSolveConfig& config, SolveDiagnostics* diag) {
  return detail::run_trajectory_sca(
      params, a, phi, traj_prev, config, tb_block_gains,
      [&](const Trajectory& expansion) { return build_tb_surrogate(params, a, phi, expansion, config).surrogate; },
      diag);
}

SolveReport tb_bcd_solve(const ScenarioParams& params, const TbSolveConfig& config) {
  detail::ProtocolHooks hooks{Protocol::TB, tb_block_gains,
                              [](const ScenarioParams& p, const std::vector<double>& a, const std::vector<double>& phi,
                                 const Trajectory& prev, const SolveConfig& c, SolveDiagnostics* d) {
                                return tb_trajectory(p, a, phi, prev, c, d);
                              }};
  return detail::run_bcd(params, config, hooks);
}

}  // namespace backcom

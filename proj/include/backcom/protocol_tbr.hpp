#pragma once

#include "backcom/barrier.hpp"
#include "backcom/core_model.hpp"
#include "backcom/rate_models.hpp"
#include "backcom/schedule_subproblems.hpp"
#include "backcom/solve_types.hpp"

#include <vector>

namespace backcom {

/// Block coefficients of the TBR protocol: harvest at waypoint 3b+1, uplink at 3b+2.
BlockGains tbr_block_gains(const ScenarioParams& params, const Trajectory& traj);
std::vector<double> tbr_uplink_rates(const ScenarioParams& params, const Trajectory& traj,
                                     const std::vector<double>& a);
/// Relay rate of every block, evaluated at waypoint 3b+3.
std::vector<double> tbr_downlink_rates(const ScenarioParams& params, const Trajectory& traj);

std::vector<double> tbr_time_allocation(const ScenarioParams& params, const Trajectory& traj,
                                        const std::vector<double>& a, EnergyRule rule = EnergyRule::Cumulative);

std::vector<double> tbr_reflection(const ScenarioParams& params, const Trajectory& traj,
                                   const std::vector<double>& phi, const std::vector<double>& a_current,
                                   const TbrSolveConfig& config = {});

/// Distance slacks of the uplink surrogate: t bounds ||q - w_b||^2 + H^2 from above, s from below.
struct TrajectorySlackState {
  std::vector<int> blocks;
  std::vector<double> t;
  std::vector<double> s;
};

struct TbrSurrogateSolution {
  Trajectory trajectory;
  TrajectorySlackState slacks;
  double objective_at_start = 0.0;
  double objective = 0.0;
  ScpStatus status = ScpStatus::InfeasibleStart;
};
TbrSurrogateSolution tbr_trajectory_surrogate(const ScenarioParams& params, const std::vector<double>& a,
                                              const std::vector<double>& phi, const Trajectory& expansion,
                                              const TbrSolveConfig& config = {});

Trajectory tbr_trajectory(const ScenarioParams& params, const std::vector<double>& a, const std::vector<double>& phi,
                          const Trajectory& traj_prev, const TbrSolveConfig& config = {},
                          SolveDiagnostics* diag = nullptr);

/// Cumulative relayed data minus cumulative received data for every block prefix.
std::vector<double> audit_information_causality(const ScenarioParams& params, const Trajectory& traj,
                                                const std::vector<double>& a, const std::vector<double>& phi);

SolveReport tbr_bcd_solve(const ScenarioParams& params, const TbrSolveConfig& config = {});

}  // namespace backcom

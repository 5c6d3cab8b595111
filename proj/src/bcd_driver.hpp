#pragma once

#include "trajectory_common.hpp"

#include <functional>

namespace backcom::detail {

using TrajectoryStep = std::function<Trajectory(const ScenarioParams&, const std::vector<double>& a,
                                                const std::vector<double>& phi, const Trajectory& prev,
                                                const SolveConfig&, SolveDiagnostics*)>;

struct ProtocolHooks {
  Protocol protocol;
  GainsFn gains;
  TrajectoryStep trajectory_step;
};

/// Alternates time allocation, reflection and trajectory updates; every accepted update is
/// exactly feasible and does not lower the objective.
SolveReport run_bcd(const ScenarioParams& params, const SolveConfig& config, const ProtocolHooks& hooks);

}  // namespace backcom::detail

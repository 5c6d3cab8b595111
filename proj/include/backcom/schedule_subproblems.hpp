#pragma once

#include "backcom/core_model.hpp"
#include "backcom/solve_types.hpp"

#include <Eigen/Core>

#include <vector>

namespace backcom {

/// Per-block coefficients once the trajectory is fixed: the backscatter rate of block b is
/// log2(1 + snr[b] * a[b]) and the block harvests harvest[b] * (1 - a[b]) watts.
struct BlockGains {
  std::vector<double> snr;
  std::vector<double> harvest;

  std::size_t size() const { return snr.size(); }
};

std::vector<double> block_rates(const BlockGains& gains, const std::vector<double>& a);
double schedule_objective(const BlockGains& gains, const std::vector<double>& a, const std::vector<double>& phi);

/// Harvest minus consumption (W) for each constraint of the rule.
std::vector<double> energy_residuals(const ScenarioParams& params, const BlockGains& gains,
                                     const std::vector<double>& a, const std::vector<double>& phi, EnergyRule rule);

/// True when every residual is >= -1e-12 * P_c (the interior tolerance used by all repairs).
bool energy_feasible(const ScenarioParams& params, const BlockGains& gains, const std::vector<double>& a,
                     const std::vector<double>& phi, EnergyRule rule);

/// Shrinks phi (uniformly for Cumulative, per block for PerSlot) just enough to satisfy the energy constraints.
std::vector<double> scale_to_feasible(const ScenarioParams& params, const BlockGains& gains,
                                      const std::vector<double>& a, std::vector<double> phi, EnergyRule rule);

// ---- time allocation ---------------------------------------------------------------------------

/// phi_b = clip(harvest_b (1 - a_b) / P_c, 0, 1): every block spends exactly what it harvested.
std::vector<double> depletion_time_allocation(const ScenarioParams& params, const BlockGains& gains,
                                              const std::vector<double>& a);

/// Conditions under which depletion_time_allocation is optimal for the cumulative problem: static
/// circuit, non-increasing rates, and no block capped at phi = 1 ahead of a later block with positive rate.
bool depletion_allocation_applies(const ScenarioParams& params, const BlockGains& gains, const std::vector<double>& a);

/// Exact LP optimum of the time-allocation subproblem.
std::vector<double> lp_time_allocation(const ScenarioParams& params, const BlockGains& gains,
                                       const std::vector<double>& a, EnergyRule rule);

/// Dispatches to the depletion closed form when it provably applies, to the per-block bound for
/// PerSlot, and to the LP otherwise. Blocks with zero rate only receive time the others leave unused.
std::vector<double> time_allocation(const ScenarioParams& params, const BlockGains& gains,
                                    const std::vector<double>& a, EnergyRule rule, SolveDiagnostics* diag = nullptr);

/// Tie-break among optimal allocations: blocks whose rate is zero receive the largest time fraction
/// the energy left over allows (latest block first), so a later reflection update can put it to use.
std::vector<double> fill_idle_blocks(const ScenarioParams& params, const BlockGains& gains,
                                     const std::vector<double>& a, std::vector<double> phi, EnergyRule rule);

// ---- reflection --------------------------------------------------------------------------------

/// Maximizer of the Lagrangian of the static-circuit reflection subproblem for multipliers nu of
/// the cumulative constraints (constraints normalized by P_c):
/// a_b = clip(phi_b / (ln2 * harvest_b / P_c * sum_{i>=b} nu_i) - 1 / snr_b, 0, 1).
std::vector<double> lagrangian_reflection(const ScenarioParams& params, const BlockGains& gains,
                                          const std::vector<double>& phi, const Eigen::VectorXd& multipliers);

struct DualReflection {
  std::vector<double> a;
  Eigen::VectorXd multipliers;
  /// Fixed-step subgradient iteration started from the multipliers confirmed optimality.
  bool certified = false;
  double slackness = 0.0;
};

/// Static circuit, cumulative rule: minimizes the dual exactly (monotone pooling over the suffix
/// sums of the multipliers), then certifies the result with the subgradient iteration.
DualReflection dual_reflection(const ScenarioParams& params, const BlockGains& gains, const std::vector<double>& phi,
                               const SolveConfig& config);

/// Per-block rule: the largest reflection each block can afford from its own harvest.
std::vector<double> per_slot_reflection(const ScenarioParams& params, const BlockGains& gains,
                                        const std::vector<double>& phi);

/// Dynamic circuit, cumulative rule: successive convex approximation with the consumed rate
/// replaced by its tangent (an upper bound), each pass solved by the barrier method.
std::vector<double> sca_reflection(const ScenarioParams& params, const BlockGains& gains,
                                   const std::vector<double>& phi, const std::vector<double>& a_start,
                                   const SolveConfig& config, SolveDiagnostics* diag = nullptr);

/// Reflection update for the rule and circuit model; a_current must be feasible with phi.
std::vector<double> reflection(const ScenarioParams& params, const BlockGains& gains, const std::vector<double>& phi,
                               const std::vector<double>& a_current, const SolveConfig& config,
                               SolveDiagnostics* diag = nullptr);

/// Largest step from a_feasible toward a_target that keeps the energy constraints satisfied.
std::vector<double> blend_reflection(const ScenarioParams& params, const BlockGains& gains,
                                     const std::vector<double>& phi, const std::vector<double>& a_feasible,
                                     const std::vector<double>& a_target, EnergyRule rule);

}  // namespace backcom

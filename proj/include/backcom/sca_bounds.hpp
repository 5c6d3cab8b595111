#pragma once

#include "backcom/core_model.hpp"
#include "backcom/rate_models.hpp"

namespace backcom {

/// Affine surrogate value + slope * (x - expansion) of a scalar function, tight at the expansion point.
struct ScaBound {
  double expansion = 0.0;
  double value = 0.0;
  double slope = 0.0;

  double operator()(double x) const { return value + slope * (x - expansion); }
};

using TbScaBound = ScaBound;
using TbrScaBound = ScaBound;

/// Tangent of the concave map a -> log2(1 + snr_gain * a) at a_l; an upper bound on [0, 1].
ScaBound rate_tangent_in_reflection(double snr_gain, double a_l);

/// TB: tangent of the reflection rate at the waypoint q (upper bound, variable a).
TbScaBound tb_reflection_bound(const ScenarioParams& params, const TbLinkConstants& consts, const Position& q,
                               double a_l);
/// TB: tangent of the rate in u = ||q - w_b||^2 at u_l (lower bound, the rate being convex in u).
TbScaBound tb_trajectory_rate_bound(const ScenarioParams& params, const TbLinkConstants& consts, double a,
                                    double u_l);
/// Tangent of the UAV-BD gain beta0 / (u + H^2) in u at u_l (lower bound, the gain being convex in u).
ScaBound gain_lower_bound(const ScenarioParams& params, double u_l);

/// TBR: tangent of the uplink rate in a (upper bound).
TbrScaBound tbr_reflection_bound(const ScenarioParams& params, const Position& q, double a_l);
/// TBR: tangent of log2(1 + C / t^2), C = P a beta0^2 / sigma_u^2, in t at t_l (lower bound).
TbrScaBound tbr_uplink_distance_bound(const ScenarioParams& params, double a, double t_l);
/// The constant C of tbr_uplink_distance_bound.
double tbr_uplink_constant(const ScenarioParams& params, double a);

}  // namespace backcom

#include "backcom/sca_bounds.hpp"

#include <cmath>
#include <numbers>

namespace backcom {

ScaBound rate_tangent_in_reflection(double snr_gain, double a_l) {
  const double arg = 1.0 + snr_gain * a_l;
  return {a_l, std::log2(arg), snr_gain / (arg * std::numbers::ln2)};
}

TbScaBound tb_reflection_bound(const ScenarioParams& params, const TbLinkConstants& consts, const Position& q,
                               double a_l) {
  const double h2 = params.altitude_h * params.altitude_h;
  return rate_tangent_in_reflection(consts.w_br / ((q - params.w_b).squaredNorm() + h2), a_l);
}

TbScaBound tb_trajectory_rate_bound(const ScenarioParams& params, const TbLinkConstants& consts, double a,
                                    double u_l) {
  const double d = u_l + params.altitude_h * params.altitude_h;
  const double wa = consts.w_br * a;
  return {u_l, std::log2(1.0 + wa / d), -wa / (d * (wa + d) * std::numbers::ln2)};
}

ScaBound gain_lower_bound(const ScenarioParams& params, double u_l) {
  const double d = u_l + params.altitude_h * params.altitude_h;
  return {u_l, params.beta0 / d, -params.beta0 / (d * d)};
}

TbrScaBound tbr_reflection_bound(const ScenarioParams& params, const Position& q, double a_l) {
  const double theta = path_gain(params, q, params.w_b);
  return rate_tangent_in_reflection(params.p_tx * theta * theta / params.sigma_u2, a_l);
}

double tbr_uplink_constant(const ScenarioParams& params, double a) {
  return params.p_tx * a * params.beta0 * params.beta0 / params.sigma_u2;
}

TbrScaBound tbr_uplink_distance_bound(const ScenarioParams& params, double a, double t_l) {
  const double c = tbr_uplink_constant(params, a);
  const double t2 = t_l * t_l;
  return {t_l, std::log2(1.0 + c / t2), -2.0 * c / ((t2 + c) * t_l * std::numbers::ln2)};
}

}  // namespace backcom

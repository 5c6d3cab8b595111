#pragma once

#include "backcom/core_model.hpp"

#include <cstdint>

namespace backcom {

class CounterRng;

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Constants of the direct BD-to-receiver link used by the TB rate approximation.
struct TbLinkConstants {
  /// e^(-kappa0) * P * beta0^2 * d_br^(-m) / sigma_r^2: the expected log-SNR of the
  /// Rayleigh BD-receiver hop folded with the mean UAV-BD gain numerator.
  double w_br = 0.0;
  double kappa0 = kEulerGamma;
  double d_br = 0.0;
};

TbLinkConstants tb_link_constants(const ScenarioParams& params);

/// log2(1 + W_br * a / (||q - w_b||^2 + H^2)).
double tb_rate_approx(const ScenarioParams& params, const TbLinkConstants& consts, const Position& q, double a_n);
/// log2(1 + P * a * theta^2 / sigma_u^2) with theta the UAV-BD gain at q.
double tbr_uplink_rate_approx(const ScenarioParams& params, const Position& q, double a_n);
/// log2(1 + P * theta_ur / sigma_r^2).
double tbr_downlink_rate_approx(const ScenarioParams& params, const Position& q);

struct ChannelSample {
  double h_ub = 0.0;
  double h_ur = 0.0;
  double h_br = 0.0;
};

ChannelSample sample_channel(const ScenarioParams& params, const Position& q, std::uint64_t seed);

/// |h|^2 of a unit-power Rician coefficient with factor K (K = inf gives exactly 1).
double rician_power_draw(double k_factor, CounterRng& rng);

enum class RateKind {
  TbReceiver,   // receiver decodes the BD signal over the UAV-BD-receiver cascade
  TbrUplink,    // UAV decodes the BD signal over the UAV-BD-UAV round trip
  TbrDownlink,  // receiver decodes the relayed UAV signal
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

inline constexpr std::int64_t kDefaultMcSamples = 100000;

McEstimate mc_expected_rate(const ScenarioParams& params, RateKind kind, const Position& q, double a_n,
                            std::int64_t n_samples, std::uint64_t seed);

/// Uplink estimate with the forward hop drawn at the harvest waypoint and the backward hop at
/// the backscatter waypoint (independent fading in the two slots).
McEstimate mc_tbr_uplink_rate(const ScenarioParams& params, const Position& q_forward, const Position& q_backward,
                              double a_n, std::int64_t n_samples, std::uint64_t seed);

/// E over the BD-receiver draw of log2(1 + x1 * E[h_ub]); upper-bounds the TB expected rate.
McEstimate mc_tb_conditional_bound(const ScenarioParams& params, const Position& q, double a_n,
                                   std::int64_t n_samples, std::uint64_t seed);

}  // namespace backcom

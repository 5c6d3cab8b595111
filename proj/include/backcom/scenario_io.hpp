#pragma once

#include "backcom/core_model.hpp"

#include <optional>
#include <string>

namespace backcom {

/// Parses a JSON scenario object. Missing keys keep their reference defaults; unknown keys, type
/// mismatches and invalid values raise ConfigError with the key and its line in the source.
///
/// Keys: protocol ("tb"|"tbr"), period_t, n_slots, delta, beta0 | beta0_db, sigma_r2 | sigma_r2_db,
/// sigma_u2 | sigma_u2_db, sigma2_db (both noise powers), p_tx, altitude_h, v_max, eta, p_eps, mu, p_c,
/// m_exp, rician_k | rician_k_db, w_b, w_r, q_init, q_final ([x, y] in metres).
/// Without n_slots the slot count follows from period_t and delta via set_period. Without p_eps the
/// idle draw is p_c / 5.
ScenarioParams parse_scenario(const std::string& text, const std::string& source = "<scenario>",
                              std::optional<Protocol> protocol = std::nullopt);

/// Reads and parses a scenario file; an empty (or whitespace-only) file yields the defaults.
ScenarioParams load_scenario(const std::string& path, std::optional<Protocol> protocol = std::nullopt);

}  // namespace backcom

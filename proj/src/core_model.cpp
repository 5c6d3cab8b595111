#include "backcom/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace backcom {

std::string to_string(Protocol protocol) { return protocol == Protocol::TB ? "tb" : "tbr"; }

Protocol protocol_from_string(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "tb") return Protocol::TB;
  if (lower == "tbr") return Protocol::TBR;
  throw ConfigError("protocol must be 'tb' or 'tbr', got '" + name + "'");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << field << " must be strictly positive and finite, got " << value;
    throw ConfigError(os.str());
  }
}

}  // namespace

void ScenarioParams::validate() const {
  require_positive(beta0, "beta0");
  require_positive(sigma_r2, "sigma_r2");
  require_positive(sigma_u2, "sigma_u2");
  require_positive(p_tx, "p_tx");
  require_positive(altitude_h, "altitude_h");
  require_positive(v_max, "v_max");
  require_positive(period_t, "period_t");
  require_positive(delta, "delta");
  require_positive(eta, "eta");
  require_positive(p_eps, "p_eps");
  require_positive(p_c, "p_c");
  require_positive(m_exp, "m_exp");
  if (eta > 1.0) throw ConfigError("eta must lie in (0, 1], got " + std::to_string(eta));
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("mu must be >= 0");
  if (!(rician_k >= 0.0)) throw ConfigError("rician_k must be >= 0");
  if (n_slots <= 0) throw ConfigError("n_slots must be positive");
  if (std::abs(delta * n_slots - period_t) > 1e-12 * period_t) {
    std::ostringstream os;
    os << "delta * n_slots must equal period_t (delta=" << delta << ", n_slots=" << n_slots
       << ", period_t=" << period_t << ")";
    throw ConfigError(os.str());
  }
  if (protocol == Protocol::TB && n_slots % 2 != 0) {
    throw ConfigError("n_slots must be divisible by 2 for protocol TB, got " + std::to_string(n_slots));
  }
  if (protocol == Protocol::TBR && n_slots % 3 != 0) {
    throw ConfigError("n_slots must be divisible by 3 for protocol TBR, got " + std::to_string(n_slots));
  }
  for (const Position* p : {&w_b, &w_r, &q_init, &q_final}) {
    if (!p->allFinite()) throw ConfigError("positions must be finite");
  }
  const double span = (q_final - q_init).norm();
  if (span > v_max * period_t * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "distance between q_init and q_final (" << span << " m) exceeds v_max * period_t ("
       << v_max * period_t << " m)";
    throw ConfigError(os.str());
  }
}

void set_period(ScenarioParams& params, double period_t) {
  params.period_t = period_t;
  const int unit = params.slots_per_block();
  const long blocks = std::max(1L, std::lround(period_t / params.delta / unit));
  params.n_slots = static_cast<int>(blocks * unit);
  params.delta = period_t / params.n_slots;
}

ScenarioParams default_scenario(Protocol protocol, double period_t) {
  ScenarioParams params;
  params.protocol = protocol;
  set_period(params, period_t);
  return params;
}

BlockSlots block_slots(Protocol protocol, int block) {
  if (protocol == Protocol::TB) return {2 * block + 1, 2 * block + 1, -1};
  return {3 * block + 1, 3 * block + 2, 3 * block + 3};
}

Trajectory straight_line(const ScenarioParams& params) {
  Trajectory traj;
  const int n = params.n_slots;
  traj.points.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double s = static_cast<double>(k) / n;
    traj.points[k] = (1.0 - s) * params.q_init + s * params.q_final;
  }
  traj.points.front() = params.q_init;
  traj.points.back() = params.q_final;
  return traj;
}

double path_gain(const ScenarioParams& params, const Position& q, const Position& w) {
  const double h = params.altitude_h;
  return params.beta0 / ((q - w).squaredNorm() + h * h);
}

double harvested_energy(const ScenarioParams& params, double a_n, double theta_n) {
  if (!(a_n >= 0.0 && a_n <= 1.0)) {
    throw std::invalid_argument("reflection coefficient outside [0, 1]: " + std::to_string(a_n));
  }
  return params.eta * (1.0 - a_n) * params.p_tx * theta_n;
}

double circuit_power(const ScenarioParams& params, double rate) { return params.p_eps + params.mu * rate; }

double consumed_power(const ScenarioParams& params, double rate) {
  return params.static_circuit() ? params.p_c : circuit_power(params, rate);
}

std::vector<double> check_energy_feasibility(const ScenarioParams& params, const Trajectory& traj,
                                             const Schedule& sched, const std::vector<double>& rates,
                                             EnergyRule rule) {
  const std::size_t blocks = sched.a.size();
  if (sched.phi.size() != blocks || rates.size() != blocks) {
    throw std::invalid_argument("schedule and rate vectors must have equal length");
  }
  const int slots_per_block = sched.protocol == Protocol::TB ? 2 : 3;
  if (traj.n_slots() < static_cast<int>(blocks) * slots_per_block) {
    throw std::invalid_argument("trajectory shorter than the schedule");
  }
  std::vector<double> residuals(blocks);
  double harvested = 0.0;
  double consumed = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const BlockSlots slots = block_slots(sched.protocol, static_cast<int>(b));
    const double theta = path_gain(params, traj.points[slots.harvest], params.w_b);
    const double h = harvested_energy(params, std::clamp(sched.a[b], 0.0, 1.0), theta);
    const double c = sched.phi[b] * consumed_power(params, rates[b]);
    if (rule == EnergyRule::Cumulative) {
      harvested += h;
      consumed += c;
      residuals[b] = harvested - consumed;
    } else {
      residuals[b] = h - c;
    }
  }
  return residuals;
}

MobilityCheck check_mobility(const ScenarioParams& params, const Trajectory& traj) {
  MobilityCheck out;
  if (traj.points.size() != static_cast<std::size_t>(params.n_slots) + 1) {
    out.max_violation = std::numeric_limits<double>::infinity();
    return out;
  }
  double worst = std::max((traj.points.front() - params.q_init).norm(),
                          (traj.points.back() - params.q_final).norm());
  const double step = params.max_step();
  for (std::size_t k = 0; k + 1 < traj.points.size(); ++k) {
    worst = std::max(worst, (traj.points[k + 1] - traj.points[k]).norm() - step);
  }
  out.max_violation = std::max(0.0, worst);
  out.feasible = worst <= kFeasibilityTol;
  return out;
}

}  // namespace backcom

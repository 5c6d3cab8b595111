#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace backcom {

using Position = Eigen::Vector2d;

enum class Protocol { TB, TBR };

std::string to_string(Protocol protocol);
Protocol protocol_from_string(const std::string& name);

/// Absolute tolerance on energy residuals (W) and on per-step flight distance (m).
inline constexpr double kFeasibilityTol = 1e-9;

/// Raised for scenarios that violate a structural or range rule.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double db_to_linear(double db);
double linear_to_db(double linear);

/// Physical constants, node layout and flight period of one scenario.
/// Defaults describe the reference two-node layout with a 2 s TB flight.
struct ScenarioParams {
  double beta0 = 1e-3;
  double sigma_r2 = 1e-9;
  double sigma_u2 = 1e-9;
  double p_tx = 1.0;
  double altitude_h = 10.0;
  double v_max = 20.0;
  double period_t = 2.0;
  int n_slots = 50;
  double delta = 0.04;
  double eta = 0.9;
  double p_eps = 2e-6;
  double mu = 0.0;
  double p_c = 1e-5;
  double m_exp = 3.0;
  double rician_k = 31.622776601683793;
  Position w_b{5.0, 0.0};
  Position w_r{15.0, 0.0};
  Position q_init{0.0, 10.0};
  Position q_final{20.0, 10.0};
  Protocol protocol = Protocol::TB;

  /// Slots per block: 2 for TB (harvest, backscatter), 3 for TBR (harvest, backscatter, relay).
  int slots_per_block() const { return protocol == Protocol::TB ? 2 : 3; }
  int block_count() const { return n_slots / slots_per_block(); }
  bool static_circuit() const { return mu == 0.0; }
  double max_step() const { return v_max * delta; }

  /// Throws ConfigError naming the violated rule.
  void validate() const;
};

/// Reference scenario for a protocol at the given flight period (slot length close to 0.04 s).
ScenarioParams default_scenario(Protocol protocol, double period_t);

/// Sets period_t and derives n_slots from the current slot length, rounded to the nearest whole
/// number of blocks; delta is then recomputed as period_t / n_slots.
void set_period(ScenarioParams& params, double period_t);

/// Waypoint indices used by block b (0-based). TB: harvest and backscatter gains are both taken at the
/// first slot of the pair. TBR: harvest at the first slot, uplink at the second, relay at the third.
struct BlockSlots {
  int harvest;
  int backscatter;
  int relay;  // -1 for TB
};
BlockSlots block_slots(Protocol protocol, int block);

struct Trajectory {
  std::vector<Position> points;

  int n_slots() const { return static_cast<int>(points.size()) - 1; }
};

Trajectory straight_line(const ScenarioParams& params);

struct Schedule {
  Protocol protocol = Protocol::TB;
  std::vector<double> a;
  std::vector<double> phi;
};

/// How the harvested energy may be spent: banked across blocks, or only inside the block that harvested it.
enum class EnergyRule { Cumulative, PerSlot };

double path_gain(const ScenarioParams& params, const Position& q, const Position& w);
double harvested_energy(const ScenarioParams& params, double a_n, double theta_n);
double circuit_power(const ScenarioParams& params, double rate);
/// Power drawn in a backscatter slot: P_c under the static model, P_eps + mu * rate otherwise.
double consumed_power(const ScenarioParams& params, double rate);

/// Harvest minus consumption per constraint (prefix sums for Cumulative, per block for PerSlot).
std::vector<double> check_energy_feasibility(const ScenarioParams& params, const Trajectory& traj,
                                             const Schedule& sched, const std::vector<double>& rates,
                                             EnergyRule rule = EnergyRule::Cumulative);

struct MobilityCheck {
  bool feasible = false;
  double max_violation = 0.0;
};
MobilityCheck check_mobility(const ScenarioParams& params, const Trajectory& traj);

}  // namespace backcom

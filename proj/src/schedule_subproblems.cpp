#include "backcom/schedule_subproblems.hpp"

#include "backcom/barrier.hpp"
#include "backcom/dual_ascent.hpp"
#include "backcom/lp.hpp"
#include "backcom/sca_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace backcom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInteriorTol = 1e-12;  // residual tolerance in units of P_c

void check_sizes(const BlockGains& gains, const std::vector<double>& v, const char* what) {
  if (gains.harvest.size() != gains.snr.size() || v.size() != gains.snr.size()) {
    throw std::invalid_argument(std::string("block vector size mismatch: ") + what);
  }
}

double rate_of(const BlockGains& gains, std::size_t b, double a) { return std::log2(1.0 + gains.snr[b] * a); }

}  // namespace

std::vector<double> block_rates(const BlockGains& gains, const std::vector<double>& a) {
  check_sizes(gains, a, "a");
  std::vector<double> r(a.size());
  for (std::size_t b = 0; b < a.size(); ++b) r[b] = rate_of(gains, b, a[b]);
  return r;
}

double schedule_objective(const BlockGains& gains, const std::vector<double>& a, const std::vector<double>& phi) {
  check_sizes(gains, a, "a");
  check_sizes(gains, phi, "phi");
  double total = 0.0;
  for (std::size_t b = 0; b < a.size(); ++b) total += phi[b] * rate_of(gains, b, a[b]);
  return total;
}

std::vector<double> energy_residuals(const ScenarioParams& params, const BlockGains& gains,
                                     const std::vector<double>& a, const std::vector<double>& phi, EnergyRule rule) {
  check_sizes(gains, a, "a");
  check_sizes(gains, phi, "phi");
  std::vector<double> out(a.size());
  double acc = 0.0;
  for (std::size_t b = 0; b < a.size(); ++b) {
    const double r = gains.harvest[b] * (1.0 - a[b]) - phi[b] * consumed_power(params, rate_of(gains, b, a[b]));
    acc = rule == EnergyRule::Cumulative ? acc + r : r;
    out[b] = acc;
  }
  return out;
}

bool energy_feasible(const ScenarioParams& params, const BlockGains& gains, const std::vector<double>& a,
                     const std::vector<double>& phi, EnergyRule rule) {
  for (std::size_t b = 0; b < a.size(); ++b) {
    if (!(a[b] >= 0.0 && a[b] <= 1.0 && phi[b] >= 0.0 && phi[b] <= 1.0)) return false;
  }
  for (double r : energy_residuals(params, gains, a, phi, rule)) {
    if (!(r >= -kInteriorTol * params.p_c)) return false;
  }
  return true;
}

std::vector<double> scale_to_feasible(const ScenarioParams& params, const BlockGains& gains,
                                      const std::vector<double>& a, std::vector<double> phi, EnergyRule rule) {
  check_sizes(gains, a, "a");
  check_sizes(gains, phi, "phi");
  constexpr double shrink = 1.0 - 1e-13;
  if (rule == EnergyRule::PerSlot) {
    for (std::size_t b = 0; b < a.size(); ++b) {
      const double c = consumed_power(params, rate_of(gains, b, a[b]));
      const double cap = gains.harvest[b] * (1.0 - a[b]) / c;
      if (phi[b] > cap) phi[b] = std::max(0.0, cap * shrink);
    }
    return phi;
  }
  double scale = 1.0;
  double harvested = 0.0;
  double consumed = 0.0;
  for (std::size_t b = 0; b < a.size(); ++b) {
    harvested += gains.harvest[b] * (1.0 - a[b]);
    consumed += phi[b] * consumed_power(params, rate_of(gains, b, a[b]));
    if (consumed > 0.0 && harvested < scale * consumed) scale = harvested / consumed;
  }
  if (scale < 1.0) {
    for (double& p : phi) p *= std::max(0.0, scale * shrink);
  }
  return phi;
}

std::vector<double> depletion_time_allocation(const ScenarioParams& params, const BlockGains& gains,
                                              const std::vector<double>& a) {
  check_sizes(gains, a, "a");
  std::vector<double> phi(a.size());
  for (std::size_t b = 0; b < a.size(); ++b) {
    phi[b] = std::clamp(gains.harvest[b] * (1.0 - a[b]) / params.p_c, 0.0, 1.0);
  }
  return phi;
}

bool depletion_allocation_applies(const ScenarioParams& params, const BlockGains& gains, const std::vector<double>& a) {
  if (!params.static_circuit()) return false;
  const std::vector<double> rates = block_rates(gains, a);
  const std::size_t n = rates.size();
  for (std::size_t b = 0; b + 1 < n; ++b) {
    if (rates[b + 1] > rates[b]) return false;
  }
  // A block whose harvest exceeds what phi = 1 can spend carries a surplus the LP would use later.
  for (std::size_t b = 0; b < n; ++b) {
    if (gains.harvest[b] * (1.0 - a[b]) > params.p_c) {
      for (std::size_t later = b + 1; later < n; ++later) {
        if (rates[later] > 0.0) return false;
      }
    }
  }
  return true;
}

std::vector<double> lp_time_allocation(const ScenarioParams& params, const BlockGains& gains,
                                       const std::vector<double>& a, EnergyRule rule) {
  check_sizes(gains, a, "a");
  const std::size_t blocks = a.size();
  const std::vector<double> rates = block_rates(gains, a);
  std::vector<int> column(blocks, -1);
  int n = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    if (rates[b] > 0.0) column[b] = n++;
  }
  std::vector<double> phi(blocks, 0.0);
  if (n == 0) return phi;

  LpProblem lp;
  lp.objective.resize(n);
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Ones(n);
  lp.a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(blocks), n);
  lp.b.resize(static_cast<Eigen::Index>(blocks));
  double harvested = 0.0;
  for (std::size_t row = 0; row < blocks; ++row) {
    const double h = gains.harvest[row] * (1.0 - a[row]) / params.p_c;
    harvested = rule == EnergyRule::Cumulative ? harvested + h : h;
    lp.b[static_cast<Eigen::Index>(row)] = harvested;
    const std::size_t first = rule == EnergyRule::Cumulative ? 0 : row;
    for (std::size_t b = first; b <= row; ++b) {
      if (column[b] >= 0) {
        lp.a(static_cast<Eigen::Index>(row), column[b]) = consumed_power(params, rates[b]) / params.p_c;
      }
    }
  }
  for (std::size_t b = 0; b < blocks; ++b) {
    if (column[b] >= 0) lp.objective[column[b]] = rates[b];
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    throw SolverError("time allocation LP ended with status " + to_string(sol.status));
  }
  for (std::size_t b = 0; b < blocks; ++b) {
    if (column[b] >= 0) phi[b] = std::clamp(sol.x[column[b]], 0.0, 1.0);
  }
  return phi;
}

std::vector<double> time_allocation(const ScenarioParams& params, const BlockGains& gains,
                                    const std::vector<double>& a, EnergyRule rule, SolveDiagnostics* diag) {
  std::vector<double> phi;
  if (rule == EnergyRule::PerSlot) {
    phi.assign(a.size(), 1.0);
    phi = scale_to_feasible(params, gains, a, phi, EnergyRule::PerSlot);
    if (diag) ++diag->closed_form_allocations;
  } else if (depletion_allocation_applies(params, gains, a)) {
    phi = depletion_time_allocation(params, gains, a);
    if (diag) ++diag->closed_form_allocations;
  } else {
    phi = lp_time_allocation(params, gains, a, rule);
    if (diag) ++diag->lp_solves;
  }
  const std::vector<double> rates = block_rates(gains, a);
  for (std::size_t b = 0; b < phi.size(); ++b) {
    if (rates[b] <= 0.0) phi[b] = 0.0;
  }
  phi = scale_to_feasible(params, gains, a, phi, rule);
  return fill_idle_blocks(params, gains, a, std::move(phi), rule);
}

std::vector<double> fill_idle_blocks(const ScenarioParams& params, const BlockGains& gains,
                                     const std::vector<double>& a, std::vector<double> phi, EnergyRule rule) {
  check_sizes(gains, a, "a");
  check_sizes(gains, phi, "phi");
  const std::vector<double> rates = block_rates(gains, a);
  const double idle_cost = consumed_power(params, 0.0);
  const double margin = 1e-12 * params.p_c;
  for (std::size_t i = phi.size(); i-- > 0;) {
    if (rates[i] > 0.0 || phi[i] > 0.0) continue;
    const std::vector<double> res = energy_residuals(params, gains, a, phi, rule);
    double room = res[i];
    if (rule == EnergyRule::Cumulative) {
      for (std::size_t n = i; n < res.size(); ++n) room = std::min(room, res[n]);
    }
    if (room <= margin) continue;
    phi[i] = std::clamp((room - margin) / idle_cost * (1.0 - 1e-12), 0.0, 1.0);
  }
  return phi;
}

// ---- reflection --------------------------------------------------------------------------------

namespace {

// a_b as a function of the suffix multiplier sum S (normalized units).
double reflection_at(double phi, double hn, double snr, double s) {
  if (phi <= 0.0) return 0.0;
  if (s <= 0.0) return 1.0;
  return std::clamp(phi / (std::numbers::ln2 * hn * s) - 1.0 / snr, 0.0, 1.0);
}

struct Pool {
  std::size_t first;
  std::size_t last;
  double s;
};

class DualPooling {
 public:
  DualPooling(const ScenarioParams& params, const BlockGains& gains, const std::vector<double>& phi)
      : gains_(gains), phi_(phi), hn_(phi.size()) {
    for (std::size_t b = 0; b < phi.size(); ++b) hn_[b] = gains.harvest[b] / params.p_c;
  }

  double reflection(std::size_t b, double s) const { return reflection_at(phi_[b], hn_[b], gains_.snr[b], s); }

  double pool_residual(std::size_t first, std::size_t last, double s) const {
    double r = 0.0;
    for (std::size_t b = first; b <= last; ++b) r += hn_[b] * (1.0 - reflection(b, s)) - phi_[b];
    return r;
  }

  // Smallest S >= 0 whose pooled residual is nonnegative (the pooled dual minimizer).
  double solve_pool(std::size_t first, std::size_t last) const {
    if (pool_residual(first, last, 0.0) >= 0.0) return 0.0;
    double lo = kInf;
    double hi = 0.0;
    for (std::size_t b = first; b <= last; ++b) {
      if (phi_[b] <= 0.0) continue;
      const double scale = phi_[b] / (std::numbers::ln2 * hn_[b]);
      lo = std::min(lo, scale / (1.0 + 1.0 / gains_.snr[b]));
      hi = std::max(hi, scale * gains_.snr[b]);
    }
    hi *= 1.0 + 1e-12;
    if (pool_residual(first, last, hi) < 0.0) return kInf;
    lo *= 1.0 - 1e-12;
    for (int it = 0; it < 400 && hi > lo * (1.0 + 4e-16); ++it) {
      const double mid = std::sqrt(lo * hi);
      if (mid <= lo || mid >= hi) break;
      if (pool_residual(first, last, mid) >= 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  }

  std::vector<double> suffix_sums() const {
    std::vector<Pool> pools;
    for (std::size_t b = 0; b < phi_.size(); ++b) {
      pools.push_back({b, b, solve_pool(b, b)});
      while (pools.size() >= 2 && pools[pools.size() - 2].s < pools.back().s) {
        const Pool tail = pools.back();
        pools.pop_back();
        pools.back().last = tail.last;
        pools.back().s = solve_pool(pools.back().first, pools.back().last);
      }
    }
    std::vector<double> s(phi_.size());
    for (const Pool& p : pools) {
      if (!std::isfinite(p.s)) throw SolverError("reflection subproblem infeasible even with zero reflection");
      for (std::size_t b = p.first; b <= p.last; ++b) s[b] = p.s;
    }
    return s;
  }

 private:
  const BlockGains& gains_;
  const std::vector<double>& phi_;
  std::vector<double> hn_;
};

Eigen::VectorXd normalized_cumulative_residuals(const ScenarioParams& params, const BlockGains& gains,
                                                const std::vector<double>& a, const std::vector<double>& phi) {
  const std::vector<double> r = energy_residuals(params, gains, a, phi, EnergyRule::Cumulative);
  Eigen::VectorXd out(static_cast<Eigen::Index>(r.size()));
  for (std::size_t b = 0; b < r.size(); ++b) out[static_cast<Eigen::Index>(b)] = r[b] / params.p_c;
  return out;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::vector<double> lagrangian_reflection(const ScenarioParams& params, const BlockGains& gains,
                                          const std::vector<double>& phi, const Eigen::VectorXd& multipliers) {
  check_sizes(gains, phi, "phi");
  const std::size_t blocks = phi.size();
  if (static_cast<std::size_t>(multipliers.size()) != blocks) throw std::invalid_argument("multiplier size mismatch");
  std::vector<double> a(blocks);
  double suffix = 0.0;
  for (std::size_t k = blocks; k-- > 0;) {
    suffix += multipliers[static_cast<Eigen::Index>(k)];
    a[k] = reflection_at(phi[k], gains.harvest[k] / params.p_c, gains.snr[k], suffix);
  }
  return a;
}

DualReflection dual_reflection(const ScenarioParams& params, const BlockGains& gains, const std::vector<double>& phi,
                               const SolveConfig& config) {
  check_sizes(gains, phi, "phi");
  const std::size_t blocks = phi.size();
  DualPooling pooling(params, gains, phi);
  const std::vector<double> s = pooling.suffix_sums();

  DualReflection out;
  out.multipliers = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(blocks));
  for (std::size_t b = 0; b < blocks; ++b) {
    const double next = b + 1 < blocks ? s[b + 1] : 0.0;
    out.multipliers[static_cast<Eigen::Index>(b)] = std::max(0.0, s[b] - next);
  }
  out.a.resize(blocks);
  for (std::size_t b = 0; b < blocks; ++b) out.a[b] = pooling.reflection(b, s[b]);

  DualState state;
  state.multipliers = out.multipliers;
  state.step = config.dual_step;
  const auto certificate = subgradient_dual_ascent(
      [&](const DualState& st) { return to_eigen(lagrangian_reflection(params, gains, phi, st.multipliers)); },
      [&](const Eigen::VectorXd& a) { return normalized_cumulative_residuals(params, gains, to_std(a), phi); },
      state, config.dual_max_iters, config.dual_tol);
  out.certified = certificate.converged;
  out.slackness = certificate.measure;
  return out;
}

std::vector<double> per_slot_reflection(const ScenarioParams& params, const BlockGains& gains,
                                        const std::vector<double>& phi) {
  check_sizes(gains, phi, "phi");
  std::vector<double> a(phi.size(), 0.0);
  for (std::size_t b = 0; b < phi.size(); ++b) {
    if (phi[b] <= 0.0) continue;
    const double h = gains.harvest[b];
    auto surplus = [&](double x) {
      return h * (1.0 - x) - phi[b] * consumed_power(params, std::log2(1.0 + gains.snr[b] * x));
    };
    if (params.static_circuit()) {
      a[b] = std::clamp(1.0 - phi[b] * params.p_c / h * (1.0 + 1e-13), 0.0, 1.0);
      continue;
    }
    if (surplus(1.0) >= 0.0) {
      a[b] = 1.0;
      continue;
    }
    double lo = 0.0;
    double hi = 1.0;
    if (surplus(lo) < 0.0) continue;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (surplus(mid) >= 0.0 ? lo : hi) = mid;
    }
    a[b] = lo;
  }
  return a;
}

std::vector<double> blend_reflection(const ScenarioParams& params, const BlockGains& gains,
                                     const std::vector<double>& phi, const std::vector<double>& a_feasible,
                                     const std::vector<double>& a_target, EnergyRule rule) {
  if (energy_feasible(params, gains, a_target, phi, rule)) return a_target;
  auto mix = [&](double tau) {
    std::vector<double> a(a_target.size());
    for (std::size_t b = 0; b < a.size(); ++b) a[b] = (1.0 - tau) * a_feasible[b] + tau * a_target[b];
    return a;
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (energy_feasible(params, gains, mix(mid), phi, rule) ? lo : hi) = mid;
  }
  return mix(lo);
}

std::vector<double> sca_reflection(const ScenarioParams& params, const BlockGains& gains,
                                   const std::vector<double>& phi, const std::vector<double>& a_start,
                                   const SolveConfig& config, SolveDiagnostics* diag) {
  check_sizes(gains, phi, "phi");
  check_sizes(gains, a_start, "a");
  const std::size_t blocks = phi.size();
  std::vector<int> var(blocks, -1);
  int n = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    if (phi[b] > 0.0) var[b] = n++;
  }
  std::vector<double> current = a_start;
  for (std::size_t b = 0; b < blocks; ++b) {
    if (var[b] < 0) current[b] = 0.0;
  }
  if (!energy_feasible(params, gains, current, phi, EnergyRule::Cumulative)) current = a_start;
  if (n == 0) return current;
  double value = schedule_objective(gains, current, phi);
  const double eps = config.relax;

  for (int pass = 0; pass < config.max_sca_passes; ++pass) {
    auto objective = std::make_shared<CompositeFunction>();
    for (std::size_t b = 0; b < blocks; ++b) {
      if (var[b] >= 0) objective->add_univariate(var[b], Profile::Log2OnePlusScaled, gains.snr[b], 0.0, phi[b]);
    }
    SmoothConvexProgram program;
    program.dimension = n;
    program.objective = objective;
    program.lower = Eigen::VectorXd::Constant(n, -eps);
    program.upper = Eigen::VectorXd::Constant(n, 1.0 + eps);
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    double bound = 0.0;
    bool any = false;
    for (std::size_t b = 0; b < blocks; ++b) {
      const double h = gains.harvest[b] / params.p_c;
      if (var[b] >= 0) {
        const ScaBound tangent = rate_tangent_in_reflection(gains.snr[b], current[b]);
        const double fixed_power = params.p_eps + params.mu * (tangent.value - tangent.slope * current[b]);
        row[var[b]] = (phi[b] * params.mu * tangent.slope) / params.p_c + h;
        bound += h - phi[b] * fixed_power / params.p_c;
        any = true;
      } else {
        bound += h;
      }
      if (any) {
        rows.push_back(row);
        rhs.push_back(bound + eps);
      }
    }
    program.affine_a.resize(static_cast<Eigen::Index>(rows.size()), n);
    program.affine_b.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      program.affine_a.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
      program.affine_b[static_cast<Eigen::Index>(r)] = rhs[r];
    }
    Eigen::VectorXd x0(n);
    for (std::size_t b = 0; b < blocks; ++b) {
      if (var[b] >= 0) x0[var[b]] = current[b];
    }
    ScpOptions opt;
    opt.tol = config.scp_rel_tol * std::max(std::abs(value), 1e-12);
    const ScpResult res = solve_scp(program, x0, opt);
    if (diag) {
      ++diag->reflection_sca_passes;
      diag->newton_steps += res.newton_steps;
      if (res.status != ScpStatus::Optimal) ++diag->inexact_solves;
    }
    if (res.status == ScpStatus::InfeasibleStart) {
      throw SolverError("reflection surrogate pass " + std::to_string(pass + 1) + ": infeasible start");
    }
    std::vector<double> candidate = current;
    for (std::size_t b = 0; b < blocks; ++b) {
      if (var[b] >= 0) candidate[b] = std::clamp(res.x[var[b]], 0.0, 1.0);
    }
    if (!energy_feasible(params, gains, candidate, phi, EnergyRule::Cumulative)) {
      candidate = blend_reflection(params, gains, phi, current, candidate, EnergyRule::Cumulative);
      if (diag) ++diag->feasibility_repairs;
    }
    const double next = schedule_objective(gains, candidate, phi);
    if (next < value) break;
    const double gain = (next - value) / std::max(std::abs(value), 1e-300);
    current = candidate;
    value = next;
    if (gain < config.sca_tol) break;
  }
  return current;
}

std::vector<double> reflection(const ScenarioParams& params, const BlockGains& gains, const std::vector<double>& phi,
                               const std::vector<double>& a_current, const SolveConfig& config,
                               SolveDiagnostics* diag) {
  std::vector<double> a;
  if (config.energy_rule == EnergyRule::PerSlot) {
    a = per_slot_reflection(params, gains, phi);
  } else if (params.static_circuit()) {
    const DualReflection dual = dual_reflection(params, gains, phi, config);
    if (diag) {
      ++diag->dual_solves;
      if (!dual.certified) ++diag->dual_certificate_failures;
    }
    a = dual.a;
  } else {
    return sca_reflection(params, gains, phi, a_current, config, diag);
  }
  if (!energy_feasible(params, gains, a, phi, config.energy_rule)) {
    a = blend_reflection(params, gains, phi, a_current, a, config.energy_rule);
    if (diag) ++diag->feasibility_repairs;
  }
  return a;
}

}  // namespace backcom

#include "backcom/rate_models.hpp"

#include "backcom/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace backcom {

TbLinkConstants tb_link_constants(const ScenarioParams& params) {
  TbLinkConstants c;
  c.d_br = (params.w_b - params.w_r).norm();
  if (!(c.d_br > 0.0)) throw std::invalid_argument("BD and receiver must not coincide");
  c.kappa0 = kEulerGamma;
  c.w_br = std::exp(-c.kappa0) * params.p_tx * params.beta0 * params.beta0 * std::pow(c.d_br, -params.m_exp) /
           params.sigma_r2;
  return c;
}

double tb_rate_approx(const ScenarioParams& params, const TbLinkConstants& consts, const Position& q, double a_n) {
  const double h = params.altitude_h;
  return std::log2(1.0 + consts.w_br * a_n / ((q - params.w_b).squaredNorm() + h * h));
}

double tbr_uplink_rate_approx(const ScenarioParams& params, const Position& q, double a_n) {
  const double theta = path_gain(params, q, params.w_b);
  return std::log2(1.0 + params.p_tx * a_n * theta * theta / params.sigma_u2);
}

double tbr_downlink_rate_approx(const ScenarioParams& params, const Position& q) {
  return std::log2(1.0 + params.p_tx * path_gain(params, q, params.w_r) / params.sigma_r2);
}

double rician_power_draw(double k_factor, CounterRng& rng) {
  if (std::isinf(k_factor)) return 1.0;
  const double los = std::sqrt(k_factor / (k_factor + 1.0));
  const double scatter = std::sqrt(0.5 / (k_factor + 1.0));
  const double re = los + scatter * rng.normal();
  const double im = scatter * rng.normal();
  return re * re + im * im;
}

ChannelSample sample_channel(const ScenarioParams& params, const Position& q, std::uint64_t seed) {
  CounterRng rng(seed);
  ChannelSample s;
  s.h_ub = path_gain(params, q, params.w_b) * rician_power_draw(params.rician_k, rng);
  s.h_ur = path_gain(params, q, params.w_r) * rician_power_draw(params.rician_k, rng);
  const double d_br = (params.w_b - params.w_r).norm();
  s.h_br = params.beta0 * std::pow(d_br, -params.m_exp) * rng.exponential();
  return s;
}

namespace {

struct NeumaierSum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      compensation += (sum - t) + x;
    } else {
      compensation += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + compensation; }
};

constexpr std::int64_t kChunk = 4096;

// Averages draw(rng) over n samples; sample i always uses the stream derive_seed(seed, i) and chunks
// are reduced in index order, so the result does not depend on the number of worker threads.
McEstimate monte_carlo(std::int64_t n_samples, std::uint64_t seed, const std::function<double(CounterRng&)>& draw) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const std::int64_t chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<double> sums(chunks), squares(chunks);
  auto run_chunk = [&](std::int64_t c) {
    NeumaierSum s, s2;
    const std::int64_t end = std::min(n_samples, (c + 1) * kChunk);
    for (std::int64_t i = c * kChunk; i < end; ++i) {
      CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
      const double v = draw(rng);
      s.add(v);
      s2.add(v * v);
    }
    sums[c] = s.value();
    squares[c] = s2.value();
  };
  const std::int64_t workers =
      std::min<std::int64_t>(chunks, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (std::int64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::int64_t c = w; c < chunks; c += workers) run_chunk(c);
      });
    }
    for (auto& t : pool) t.join();
  }
  NeumaierSum total, total2;
  for (std::int64_t c = 0; c < chunks; ++c) {
    total.add(sums[c]);
    total2.add(squares[c]);
  }
  const double n = static_cast<double>(n_samples);
  McEstimate est;
  est.samples = n_samples;
  est.mean = total.value() / n;
  if (n_samples > 1) {
    const double var = std::max(0.0, (total2.value() - n * est.mean * est.mean) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

McEstimate zero_estimate(std::int64_t n_samples) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  return McEstimate{0.0, 0.0, n_samples};
}

}  // namespace

McEstimate mc_expected_rate(const ScenarioParams& params, RateKind kind, const Position& q, double a_n,
                            std::int64_t n_samples, std::uint64_t seed) {
  switch (kind) {
    case RateKind::TbReceiver: {
      if (a_n == 0.0) return zero_estimate(n_samples);
      const double theta = path_gain(params, q, params.w_b);
      const double d_br = (params.w_b - params.w_r).norm();
      const double scale = params.p_tx * a_n * theta * params.beta0 * std::pow(d_br, -params.m_exp) / params.sigma_r2;
      const double k = params.rician_k;
      return monte_carlo(n_samples, seed, [=](CounterRng& rng) {
        const double fading = rician_power_draw(k, rng);
        return std::log2(1.0 + scale * fading * rng.exponential());
      });
    }
    case RateKind::TbrUplink:
      return mc_tbr_uplink_rate(params, q, q, a_n, n_samples, seed);
    case RateKind::TbrDownlink: {
      const double scale = params.p_tx * path_gain(params, q, params.w_r) / params.sigma_r2;
      const double k = params.rician_k;
      return monte_carlo(n_samples, seed,
                         [=](CounterRng& rng) { return std::log2(1.0 + scale * rician_power_draw(k, rng)); });
    }
  }
  throw std::invalid_argument("unknown rate kind");
}

McEstimate mc_tbr_uplink_rate(const ScenarioParams& params, const Position& q_forward, const Position& q_backward,
                              double a_n, std::int64_t n_samples, std::uint64_t seed) {
  if (a_n == 0.0) return zero_estimate(n_samples);
  const double scale = params.p_tx * a_n * path_gain(params, q_forward, params.w_b) *
                       path_gain(params, q_backward, params.w_b) / params.sigma_u2;
  const double k = params.rician_k;
  return monte_carlo(n_samples, seed, [=](CounterRng& rng) {
    const double forward = rician_power_draw(k, rng);
    const double backward = rician_power_draw(k, rng);
    return std::log2(1.0 + scale * forward * backward);
  });
}

McEstimate mc_tb_conditional_bound(const ScenarioParams& params, const Position& q, double a_n,
                                   std::int64_t n_samples, std::uint64_t seed) {
  if (a_n == 0.0) return zero_estimate(n_samples);
  const double theta = path_gain(params, q, params.w_b);
  const double d_br = (params.w_b - params.w_r).norm();
  const double scale = params.p_tx * a_n * theta * params.beta0 * std::pow(d_br, -params.m_exp) / params.sigma_r2;
  return monte_carlo(n_samples, seed, [=](CounterRng& rng) { return std::log2(1.0 + scale * rng.exponential()); });
}

}  // namespace backcom

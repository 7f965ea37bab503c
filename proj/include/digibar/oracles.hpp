#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "digibar/crr.hpp"
#include "digibar/normal.hpp"
#include "digibar/types.hpp"

namespace digibar {

// Exact discounted expectation over all 2^n up/down paths, applying the knock
// rule path-wise and the digital payoff at maturity. European only; the
// budget caps n at 22.
inline PriceResult enumerate_paths_price(const MarketParams& market,
                                         const DigitalOptionSpec& spec, int n,
                                         ProbabilityRule rule = ProbabilityRule::martingale) {
  validate(market, spec);
  if (n > 22) throw ValidationError("enumeration supports n <= 22");
  if (n < 1) throw ValidationError("step count must be >= 1");
  if (spec.style == ExerciseStyle::american)
    throw ValidationError("enumeration supports European style only");
  const TreeParams t = build_tree_params(market, n, rule);
  const double sdt = market.sigma * std::sqrt(t.dtau);
  const bool down = spec.barrier_side == BarrierSide::down;
  const long long knock_lvl = down ? detail::down_knock_level(market, spec.barrier, sdt)
                                   : detail::up_knock_level(market, spec.barrier, sdt);
  const long long strike_lvl = detail::strike_level(market, spec.strike, sdt);
  const bool is_call = spec.side == OptionSide::call;
  const bool want_touched = spec.knock == Knock::in;

  std::vector<double> pow_p(n + 1), pow_q(n + 1);
  pow_p[0] = pow_q[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    pow_p[i] = pow_p[i - 1] * t.p;
    pow_q[i] = pow_q[i - 1] * (1.0 - t.p);
  }
  const bool root_knocked = down ? 0 <= knock_lvl : 0 >= knock_lvl;

  detail::KahanSum acc;
  const std::uint64_t total = 1ull << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    long long m = 0;
    int ups = 0;
    bool touched = root_knocked;
    std::uint64_t bits = mask;
    for (int step = 0; step < n; ++step) {
      if (bits & 1ull) {
        ++m;
        ++ups;
      } else {
        --m;
      }
      bits >>= 1;
      if (down ? m <= knock_lvl : m >= knock_lvl) touched = true;
    }
    if (touched != want_touched) continue;
    const double call_pays = m >= strike_lvl ? 1.0 : 0.0;
    const double pay = is_call ? call_pays : 1.0 - call_pays;
    if (pay != 0.0) acc.add(pow_p[ups] * pow_q[n - ups]);
  }
  PriceResult res;
  res.price = std::exp(-market.r * market.T) * acc.s;
  res.method = PricingMethod::enumeration;
  res.n_steps = n;
  return res;
}

struct McConfig {
  long long paths = 1'000'000;
  int steps_per_year = 365;
  std::uint64_t seed = 42;
  bool use_bridge_correction = true;
  int num_threads = 0;  // 0 = hardware concurrency; the estimate is identical for any value
};

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Per-path substream: a splitmix64 stream whose start state is a full mix of
// (seed, path index), so paths are reproducible independently of scheduling.
inline std::uint64_t path_stream_state(std::uint64_t seed, std::uint64_t path) {
  std::uint64_t h = seed ^ (path * 0x9e3779b97f4a7c15ull + 0xd1b54a32d192ed03ull);
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

inline double uniform01(std::uint64_t bits) {
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

// Monte Carlo under exact-in-law log-normal stepping, knock-out applied per
// step; with the bridge correction each surviving step also knocks with the
// Brownian-bridge crossing probability exp(-2 a b / (sigma^2 h)). Returns the
// mean discounted payoff with its standard error in the diagnostics. Paths
// are sharded over a fixed block grid, so the estimate is bit-identical for
// any thread count.
inline PriceResult mc_price(const MarketParams& market, const DigitalOptionSpec& spec,
                            const McConfig& cfg) {
  validate(market, spec);
  if (spec.style == ExerciseStyle::american)
    throw ValidationError("Monte Carlo supports European style only");
  if (cfg.paths < 1) throw ValidationError("paths must be >= 1");
  if (cfg.steps_per_year < 1) throw ValidationError("steps_per_year must be >= 1");

  const int n_steps = std::max(1, int(std::llround(double(cfg.steps_per_year) * market.T)));
  const double h = market.T / n_steps;
  const double drift = (market.r - 0.5 * market.sigma * market.sigma) * h;
  const double vol_step = market.sigma * std::sqrt(h);
  const double inv_var = 1.0 / (market.sigma * market.sigma * h);
  const double log_barrier = std::log(spec.barrier);
  const double log_strike = std::log(spec.strike);
  const double x0 = std::log(market.s0);
  const bool down = spec.barrier_side == BarrierSide::down;
  const bool is_call = spec.side == OptionSide::call;
  const bool is_out = spec.knock == Knock::out;
  const double discount = std::exp(-market.r * market.T);
  const bool dead_at_start = down ? x0 <= log_barrier : x0 >= log_barrier;

  const int nblocks = int(std::min<long long>(1024, cfg.paths));
  std::vector<double> block_sum(nblocks, 0.0), block_sumsq(nblocks, 0.0);

  const auto run_block = [&](int b) {
    const long long lo = cfg.paths * b / nblocks;
    const long long hi = cfg.paths * (b + 1) / nblocks;
    detail::KahanSum sum, sumsq;
    for (long long path = lo; path < hi; ++path) {
      std::uint64_t state = detail::path_stream_state(cfg.seed, std::uint64_t(path));
      double x = x0;
      double survival = dead_at_start ? 0.0 : 1.0;
      for (int step = 0; step < n_steps && !(is_out && survival == 0.0); ++step) {
        const double z = norm_ppf(detail::uniform01(detail::splitmix64_next(state)));
        const double xn = x + drift + vol_step * z;
        if (survival != 0.0) {
          const bool dead = down ? xn <= log_barrier : xn >= log_barrier;
          if (dead) {
            survival = 0.0;
          } else if (cfg.use_bridge_correction) {
            const double a = down ? x - log_barrier : log_barrier - x;
            const double bb = down ? xn - log_barrier : log_barrier - xn;
            const double expo = -2.0 * a * bb * inv_var;
            if (expo > -40.0) survival *= -std::expm1(expo);
          }
        }
        x = xn;
      }
      const double call_pays = x >= log_strike ? 1.0 : 0.0;
      const double pay = is_call ? call_pays : 1.0 - call_pays;
      const double weight = is_out ? survival : 1.0 - survival;
      const double y = discount * pay * weight;
      sum.add(y);
      sumsq.add(y * y);
    }
    block_sum[size_t(b)] = sum.s;
    block_sumsq[size_t(b)] = sumsq.s;
  };

  unsigned hw = std::thread::hardware_concurrency();
  int workers = cfg.num_threads > 0 ? cfg.num_threads : int(hw ? hw : 1);
  workers = std::min<int>(workers, nblocks);
  if (workers <= 1) {
    for (int b = 0; b < nblocks; ++b) run_block(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1)) run_block(b);
      });
    for (auto& th : pool) th.join();
  }

  long double total = 0.0L, total_sq = 0.0L;
  for (int b = 0; b < nblocks; ++b) {
    total += block_sum[size_t(b)];
    total_sq += block_sumsq[size_t(b)];
  }
  const double mean = double(total / cfg.paths);
  double se = 0.0;
  if (cfg.paths > 1) {
    const long double var =
        (total_sq - (long double)(cfg.paths) * (long double)(mean) * (long double)(mean)) /
        (long double)(cfg.paths - 1);
    se = var > 0.0L ? double(std::sqrt(double(var / cfg.paths))) : 0.0;
  }

  PriceResult res;
  res.price = mean;
  res.method = PricingMethod::monte_carlo;
  res.diagnostics["standard_error"] = se;
  res.diagnostics["paths"] = double(cfg.paths);
  res.diagnostics["steps"] = double(n_steps);
  res.diagnostics["seed"] = double(cfg.seed);
  res.diagnostics["bridge"] = cfg.use_bridge_correction ? 1.0 : 0.0;
  return res;
}

}  // namespace digibar

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "digibar/analytic.hpp"
#include "digibar/types.hpp"

namespace digibar {

// One-step up probability. `martingale` is the exact risk-neutral probability
// (e^{r dtau} - d)/(u - d); `gaussian_walk` is its leading-order expansion
// 1/2 + (r - sigma^2/2) sqrt(dtau) / (2 sigma). The two differ at
// O(dtau^{3/2}) and move lattice prices by O(1/n); the reference tables in
// the convergence harness were generated under the walk rule.
enum class ProbabilityRule { martingale, gaussian_walk };

struct TreeParams {
  int n;
  double dtau;      // T / n
  double u;         // e^{sigma sqrt(dtau)}
  double d;         // 1 / u
  double p;         // up probability, in (0, 1)
  double discount;  // e^{-r dtau}
};

namespace detail {

inline double up_probability(double r, double sigma, double dt, ProbabilityRule rule) {
  const double sdt = sigma * std::sqrt(dt);
  double p;
  if (rule == ProbabilityRule::martingale) {
    const double u = std::exp(sdt);
    p = (std::exp(r * dt) - 1.0 / u) * u / (u * u - 1.0);
  } else {
    p = 0.5 + (r - 0.5 * sigma * sigma) * std::sqrt(dt) / (2.0 * sigma);
  }
  if (!(p > 0.0 && p < 1.0)) throw DegenerateTreeError("degenerate tree: p outside (0,1)");
  return p;
}

// Node classification happens on integer level indices m = 2j - i. The log
// threshold carries the tolerance 1e-12 * max(1, |log level|) so that
// deliberately aligned barriers and strikes (ulp-level noise from log/div)
// land on the intended side, matching the inclusive knock convention.
inline double index_tol(double log_level, double sigma_sqrt_dt) {
  return 1e-12 * std::max(1.0, std::fabs(log_level)) / sigma_sqrt_dt;
}

inline long long fuzzy_floor(double x, double tol) {
  return static_cast<long long>(std::floor(x + tol));
}

inline long long fuzzy_ceil(double x, double tol) {
  return static_cast<long long>(std::ceil(x - tol));
}

// Smallest level index m with s0 e^{m sdt} >= K (call pays at m >= this).
inline long long strike_level(const MarketParams& m, double strike, double sdt) {
  const double y = std::log(strike / m.s0) / sdt;
  return fuzzy_ceil(y, index_tol(std::log(strike), sdt));
}

// Down barriers: knocked iff m <= this. Highest lattice level at or below L.
inline long long down_knock_level(const MarketParams& m, double barrier, double sdt) {
  const double y = std::log(barrier / m.s0) / sdt;
  return fuzzy_floor(y, index_tol(std::log(barrier), sdt));
}

// Up barriers: knocked iff m >= this.
inline long long up_knock_level(const MarketParams& m, double barrier, double sdt) {
  const double y = std::log(barrier / m.s0) / sdt;
  return fuzzy_ceil(y, index_tol(std::log(barrier), sdt));
}

inline double log_binom(long long n, long long k) {
  return std::lgamma(double(n + 1)) - std::lgamma(double(k + 1)) - std::lgamma(double(n - k + 1));
}

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

inline long long floor_div2(long long a) { return a >= 0 ? a / 2 : (a - 1) / 2; }

}  // namespace detail

inline TreeParams build_tree_params(const MarketParams& m, int n,
                                    ProbabilityRule rule = ProbabilityRule::martingale) {
  if (n < 1) throw ValidationError("step count must be >= 1");
  if (!(m.s0 > 0.0 && m.sigma > 0.0 && m.T > 0.0 && m.r >= 0.0))
    throw ValidationError("invalid market parameters");
  TreeParams t;
  t.n = n;
  t.dtau = m.T / n;
  t.u = std::exp(m.sigma * std::sqrt(t.dtau));
  t.d = 1.0 / t.u;
  t.p = detail::up_probability(m.r, m.sigma, t.dtau, rule);
  t.discount = std::exp(-m.r * t.dtau);
  return t;
}

// S_{i,j} = s0 e^{(2j - i) sigma sqrt(dtau)}
inline double node_price(const TreeParams& t, double s0, int i, int j) {
  if (i < 0 || i > t.n || j < 0 || j > i) throw std::out_of_range("node index out of range");
  return s0 * std::exp((2.0 * j - i) * std::log(t.u));
}

// Positions of the strike and of the effective barrier relative to the
// lattice, for one (market, strike, barrier, n). delta_K in (-1, 1] and
// delta_L in [0, 1) drive the O(1/sqrt(n)) error term; eps_n flags whether
// the effective barrier is a terminal stock price.
struct LatticeGeometry {
  long long j_K;      // smallest j with S_{n, j} >= K
  double delta_K;     // 1 - 2 frac(log(s0/K)/(2 sigma sqrt(dtau)) - n/2)
  double l_L;         // log(L/s0)/(2 sigma sqrt(dtau)) + n/2
  double j_L;         // up jumps to reach L_tilde on the layer where it lives
  double j_tilde_L;   // reflection index; 2 j_tilde_L = floor(2 l_L), half-integer when eps_n = 0
  int eps_n;          // 1 iff the effective barrier lies on the terminal layer
  double delta_L;     // frac(2 l_L)
  double L_tilde;     // highest lattice level <= L
};

inline LatticeGeometry lattice_geometry(const MarketParams& m, double strike, double barrier,
                                        int n) {
  if (!(strike > 0.0 && barrier > 0.0)) throw ValidationError("nonpositive strike or barrier");
  const TreeParams t = build_tree_params(m, n);
  const double sdt = m.sigma * std::sqrt(t.dtau);
  const double tolK = detail::index_tol(std::log(strike), sdt);
  const double tolL = detail::index_tol(std::log(barrier), sdt);

  LatticeGeometry g;
  const long long mK = detail::strike_level(m, strike, sdt);
  g.j_K = static_cast<long long>(std::ceil((double(mK) + n) / 2.0));
  const double frac_arg = std::log(m.s0 / strike) / (2.0 * sdt) - n / 2.0;
  double fr = frac_arg - std::floor(frac_arg + tolK);
  if (fr < 0.0) fr = 0.0;
  g.delta_K = 1.0 - 2.0 * fr;

  g.l_L = std::log(barrier / m.s0) / (2.0 * sdt) + n / 2.0;
  const long long floor2l = detail::fuzzy_floor(2.0 * g.l_L, tolL);  // = n + barrier level
  double dl = 2.0 * g.l_L - double(floor2l);
  if (dl < 0.0) dl = 0.0;
  g.delta_L = dl;
  g.eps_n = (floor2l % 2 == 0) ? 1 : 0;
  g.j_tilde_L = double(floor2l) / 2.0;
  g.j_L = g.j_tilde_L - 0.5 * (1 - g.eps_n);
  g.L_tilde = m.s0 * std::exp(double(floor2l - n) * sdt);
  return g;
}

// Number of n-step paths ending at up-count j that touch or pass through the
// effective barrier, by the reflection principle. Exact for n <= 60; log-gamma
// approximation beyond.
inline double reflection_path_count(long long n, long long j, double j_tilde_L) {
  auto binom = [](long long nn, long long kk) -> double {
    if (kk < 0 || kk > nn) return 0.0;
    if (kk > nn - kk) kk = nn - kk;
    if (nn <= 60) {
      double r = 1.0;
      for (long long i = 1; i <= kk; ++i) r = r * double(nn - kk + i) / double(i);
      return r;
    }
    return std::exp(detail::log_binom(nn, kk));
  };
  if (j < 0 || j > n) return 0.0;
  if (double(j) > 2.0 * j_tilde_L) return 0.0;
  if (double(j) <= j_tilde_L) return binom(n, j);
  const double refl = 2.0 * j_tilde_L - double(j);
  const double rounded = std::round(refl);
  if (std::fabs(refl - rounded) > 1e-9) return 0.0;
  return binom(n, static_cast<long long>(rounded));
}

namespace detail {

struct BackwardSetup {
  long long strike_lvl;   // call pays at m >= strike_lvl
  long long knock_lvl;    // down: dead at m <= knock_lvl; up: dead at m >= knock_lvl
  bool down;
  bool is_call;
  bool bond;              // payoff identically 1 at alive nodes
  double payoff(long long m) const {
    if (bond) return 1.0;
    const double call_pays = m >= strike_lvl ? 1.0 : 0.0;
    return is_call ? call_pays : 1.0 - call_pays;
  }
  bool knocked(long long m) const { return down ? m <= knock_lvl : m >= knock_lvl; }
};

// Backward induction over the full recombining tree in extended precision.
// Knock-in options run a coupled pair of lattices: `vanilla` carries the
// already-knocked-in option and the main lattice copies it at barrier nodes.
inline double backward_engine(const MarketParams& market, const BackwardSetup& bs, Knock knock,
                              ExerciseStyle style, const TreeParams& t) {
  const int n = t.n;
  const bool american = style == ExerciseStyle::american;
  const bool is_in = knock == Knock::in;
  const long double p = t.p;
  const long double q = 1.0L - p;
  const long double disc = t.discount;

  std::vector<long double> v(n + 1);
  std::vector<long double> vanilla;
  if (is_in) vanilla.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    const long long m = 2LL * j - n;
    const double pay = bs.payoff(m);
    if (is_in) {
      vanilla[j] = pay;
      v[j] = bs.knocked(m) ? pay : 0.0;
    } else {
      v[j] = bs.knocked(m) ? 0.0 : pay;
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int j = 0; j <= i; ++j) {
      const long long m = 2LL * j - i;
      if (is_in) {
        long double cont_v = disc * (p * vanilla[j + 1] + q * vanilla[j]);
        if (american) {
          const long double ex = bs.payoff(m);
          if (ex > cont_v) cont_v = ex;
        }
        vanilla[j] = cont_v;
        v[j] = bs.knocked(m) ? vanilla[j] : disc * (p * v[j + 1] + q * v[j]);
      } else {
        if (bs.knocked(m)) {
          v[j] = 0.0;
        } else {
          long double cont = disc * (p * v[j + 1] + q * v[j]);
          if (american) {
            const long double ex = bs.payoff(m);
            if (ex > cont) cont = ex;
          }
          v[j] = cont;
        }
      }
    }
  }
  return static_cast<double>(v[0]);
}

}  // namespace detail

inline PriceResult price_backward(const MarketParams& market, const DigitalOptionSpec& spec,
                                  int n, ProbabilityRule rule = ProbabilityRule::martingale) {
  validate(market, spec);
  const TreeParams t = build_tree_params(market, n, rule);
  const double sdt = market.sigma * std::sqrt(t.dtau);

  detail::BackwardSetup bs;
  bs.strike_lvl = detail::strike_level(market, spec.strike, sdt);
  bs.down = spec.barrier_side == BarrierSide::down;
  bs.knock_lvl = bs.down ? detail::down_knock_level(market, spec.barrier, sdt)
                         : detail::up_knock_level(market, spec.barrier, sdt);
  bs.is_call = spec.side == OptionSide::call;
  bs.bond = false;

  PriceResult res;
  res.price = detail::backward_engine(market, bs, spec.knock, spec.style, t);
  res.method = PricingMethod::crr;
  res.n_steps = n;
  if (bs.down) {
    const LatticeGeometry g = lattice_geometry(market, spec.strike, spec.barrier, n);
    res.diagnostics["delta_K"] = g.delta_K;
    res.diagnostics["delta_L"] = g.delta_L;
    res.diagnostics["eps_n"] = g.eps_n;
  }
  return res;
}

// Knock-out bond on the same tree: pays 1 at maturity iff the barrier is
// never breached; under early exercise pays 1 on exercise at alive nodes.
inline PriceResult price_barrier_bond_backward(const MarketParams& market, double barrier,
                                               BarrierSide side, ExerciseStyle style, int n,
                                               ProbabilityRule rule = ProbabilityRule::martingale) {
  if (!(barrier > 0.0)) throw ValidationError("nonpositive barrier");
  const TreeParams t = build_tree_params(market, n, rule);
  const double sdt = market.sigma * std::sqrt(t.dtau);
  detail::BackwardSetup bs;
  bs.strike_lvl = 0;
  bs.down = side == BarrierSide::down;
  bs.knock_lvl = bs.down ? detail::down_knock_level(market, barrier, sdt)
                         : detail::up_knock_level(market, barrier, sdt);
  bs.is_call = true;
  bs.bond = true;
  PriceResult res;
  res.price = detail::backward_engine(market, bs, Knock::out, style, t);
  res.method = PricingMethod::crr;
  res.n_steps = n;
  return res;
}

// Binomial price of the vanilla digital call:
// e^{-rT} sum_{j=j_K}^{n} C(n,j) p^j (1-p)^{n-j}.
inline PriceResult price_vanilla_digital_combinatorial(
    const MarketParams& m, double strike, int n,
    ProbabilityRule rule = ProbabilityRule::martingale) {
  if (!(strike > 0.0)) throw ValidationError("nonpositive strike");
  const TreeParams t = build_tree_params(m, n, rule);
  const double sdt = m.sigma * std::sqrt(t.dtau);
  const long long mK = detail::strike_level(m, strike, sdt);
  const long long jK = static_cast<long long>(std::ceil((double(mK) + n) / 2.0));
  const double lp = std::log(t.p);
  const double lq = std::log1p(-t.p);
  detail::KahanSum acc;
  for (long long j = std::max(jK, 0LL); j <= n; ++j)
    acc.add(std::exp(detail::log_binom(n, j) + double(j) * lp + double(n - j) * lq));
  double sum = std::min(acc.s, 1.0);
  return {std::exp(-m.r * m.T) * sum, PricingMethod::crr_combinatorial, n, {}};
}

// Down-and-in digital call with L < K < s0 (reflection-principle closed form):
// e^{-rT} sum_{i=j_K}^{2 j_tilde_L} C(n, 2 j_tilde_L - i) p^i (1-p)^{n-i}.
inline PriceResult price_di_combinatorial(const MarketParams& m, double strike, double barrier,
                                          int n,
                                          ProbabilityRule rule = ProbabilityRule::martingale) {
  if (!(barrier < strike)) throw RegimeError("wrong regime: requires L < K");
  detail::require_alive_down(m, barrier);
  const TreeParams t = build_tree_params(m, n, rule);
  const LatticeGeometry g = lattice_geometry(m, strike, barrier, n);
  const long long cap = static_cast<long long>(std::llround(2.0 * g.j_tilde_L));
  const double lp = std::log(t.p);
  const double lq = std::log1p(-t.p);
  detail::KahanSum acc;
  const long long lo = std::max({g.j_K, 0LL, cap - n});
  for (long long i = lo; i <= cap; ++i)
    acc.add(std::exp(detail::log_binom(n, cap - i) + double(i) * lp + double(n - i) * lq));
  return {std::exp(-m.r * m.T) * acc.s, PricingMethod::crr_combinatorial, n, {}};
}

// Down-and-out digital call with K < L < s0:
// e^{-rT} [ sum_{i > j_tilde_L} C(n,i) p^i q^{n-i}
//         - sum_{j_tilde_L < i <= 2 j_tilde_L} C(n, 2 j_tilde_L - i) p^i q^{n-i} ].
// Half-integer j_tilde_L resolves to first index floor(j_tilde_L)+1 and
// reflected cap floor(2 j_tilde_L).
inline PriceResult price_do_combinatorial(const MarketParams& m, double strike, double barrier,
                                          int n,
                                          ProbabilityRule rule = ProbabilityRule::martingale) {
  if (!(strike < barrier)) throw RegimeError("wrong regime: requires K < L");
  detail::require_alive_down(m, barrier);
  const TreeParams t = build_tree_params(m, n, rule);
  const LatticeGeometry g = lattice_geometry(m, strike, barrier, n);
  const long long cap = static_cast<long long>(std::llround(2.0 * g.j_tilde_L));
  const long long first = detail::floor_div2(cap) + 1;
  const double lp = std::log(t.p);
  const double lq = std::log1p(-t.p);
  detail::KahanSum alive;
  for (long long i = std::max(first, 0LL); i <= n; ++i)
    alive.add(std::exp(detail::log_binom(n, i) + double(i) * lp + double(n - i) * lq));
  detail::KahanSum reflected;
  for (long long i = std::max({first, 0LL, cap - n}); i <= cap; ++i)
    reflected.add(std::exp(detail::log_binom(n, cap - i) + double(i) * lp + double(n - i) * lq));
  double price = std::exp(-m.r * m.T) * (alive.s - reflected.s);
  if (price < 0.0) price = 0.0;
  return {price, PricingMethod::crr_combinatorial, n, {}};
}

// Closed-form lattice price for any of the four down-barrier regimes, using
// the two direct formulas plus in/out parity on the same tree. European only.
inline PriceResult price_combinatorial(const MarketParams& m, const DigitalOptionSpec& spec,
                                       int n,
                                       ProbabilityRule rule = ProbabilityRule::martingale) {
  validate(m, spec);
  if (spec.style == ExerciseStyle::american)
    throw RegimeError("combinatorial formulas are European only");
  if (spec.barrier_side == BarrierSide::up)
    throw RegimeError("combinatorial formulas cover down barriers only");
  if (spec.side == OptionSide::put)
    throw RegimeError("combinatorial formulas cover calls only");
  if (spec.barrier == spec.strike) throw RegimeError("wrong regime: barrier equals strike");
  const double vanilla = price_vanilla_digital_combinatorial(m, spec.strike, n, rule).price;
  double price;
  if (spec.barrier < spec.strike) {
    const double di = price_di_combinatorial(m, spec.strike, spec.barrier, n, rule).price;
    price = spec.knock == Knock::in ? di : vanilla - di;
  } else {
    const double dout = price_do_combinatorial(m, spec.strike, spec.barrier, n, rule).price;
    price = spec.knock == Knock::out ? dout : vanilla - dout;
  }
  if (price < 0.0) price = 0.0;
  return {price, PricingMethod::crr_combinatorial, n, {}};
}

}  // namespace digibar

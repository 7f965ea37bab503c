#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "digibar/crr.hpp"
#include "digibar/expansion.hpp"
#include "digibar/types.hpp"

namespace digibar {

// Calibrated mesh of the Adjusted Binomial Interpolated Lattice. The time
// step is chosen so that, in log space, the barrier lies exactly on a
// terminal-layer node and the strike exactly halfway between two adjacent
// terminal nodes. Node ladder: level m has log price anchor_log + m * step_log,
// with active parity alternating per time level; the barrier sits at m = 0
// and the strike at the odd index strike_level. Time levels run
// tau_j = T - j * dt for j = 0..n_prime, the last two straddling t = 0.
struct BilMesh {
  double k;          // half-integer count: (log K - log L) / (2 sigma sqrt(dt))
  double dt;         // calibrated step
  int n_prime;       // floor(T/dt) + 2
  double maturity;
  double anchor_log;  // log(barrier)
  double step_log;    // sigma sqrt(dt)
  long long strike_level;
  long long m_min, m_max;
  double tau_a;  // T - (n_prime-2) dt, in [0, dt)
  double tau_b;  // tau_a - 2 dt, negative

  double level_log(long long m) const { return anchor_log + double(m) * step_log; }
  double time_level(int j) const { return maturity - double(j) * dt; }
};

inline BilMesh calibrate_mesh(const MarketParams& market, const DigitalOptionSpec& spec, int n) {
  validate(market, spec);
  if (spec.barrier_side != BarrierSide::down)
    throw RegimeError("adjusted BIL covers single down barriers only");
  if (n < 4) throw ValidationError("adjusted BIL requires n >= 4");
  const double lnK = std::log(spec.strike);
  const double lnL = std::log(spec.barrier);
  if (std::fabs(lnK - lnL) <= 1e-12 * std::max(1.0, std::fabs(lnL)))
    throw RegimeError("adjusted BIL requires K != L");

  BilMesh mesh;
  const double dtau = market.T / n;
  mesh.k = std::ceil((lnK - lnL) / (2.0 * market.sigma * std::sqrt(dtau))) + 0.5;
  mesh.dt = std::pow((lnK - lnL) / (2.0 * market.sigma * mesh.k), 2);
  detail::up_probability(market.r, market.sigma, mesh.dt, ProbabilityRule::martingale);
  mesh.n_prime = static_cast<int>(std::floor(market.T / mesh.dt)) + 2;
  mesh.maturity = market.T;
  mesh.anchor_log = lnL;
  mesh.step_log = market.sigma * std::sqrt(mesh.dt);
  mesh.strike_level = std::llround(2.0 * mesh.k);
  mesh.tau_a = market.T - double(mesh.n_prime - 2) * mesh.dt;
  mesh.tau_b = mesh.tau_a - 2.0 * mesh.dt;

  const double xi_spot = (std::log(market.s0) - lnL) / mesh.step_log;
  const double drift_levels = std::fabs(market.r - 0.5 * market.sigma * market.sigma) *
                              market.T / mesh.step_log;
  const long long W =
      static_cast<long long>(std::ceil(8.0 * std::sqrt(market.T / mesh.dt) + drift_levels)) + 4;
  const long long stencil_floor =
      std::min(-2LL, static_cast<long long>(std::floor(xi_spot)) - 6);
  mesh.m_max = static_cast<long long>(
                   std::ceil(std::max(xi_spot, double(mesh.strike_level)))) + W;
  if (spec.knock == Knock::out) {
    // everything at or below the barrier is dead; no need to mesh the tail
    mesh.m_min = stencil_floor;
  } else {
    const long long tail_floor = static_cast<long long>(
        std::floor(std::min(xi_spot, double(mesh.strike_level)))) - W;
    mesh.m_min = std::min(tail_floor, stencil_floor);
  }
  return mesh;
}

// Value at x of the unique cubic through four points with strictly ascending
// abscissae.
inline double lagrange4(const std::array<double, 4>& xs, const std::array<double, 4>& ys,
                        double x) {
  for (int i = 1; i < 4; ++i)
    if (!(xs[i] > xs[i - 1])) throw ValidationError("non-ascending abscissae");
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    double w = 1.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) w *= (x - xs[j]) / (xs[i] - xs[j]);
    total += w * ys[i];
  }
  return total;
}

namespace detail {

struct BilLattice {
  // values indexed by level m - m_min; only entries of the active parity are
  // meaningful at any time step
  std::vector<double> v;
  long long m_min, m_max;
  double& at(long long m) { return v[size_t(m - m_min)]; }
  double at(long long m) const { return v[size_t(m - m_min)]; }
};

}  // namespace detail

// Adjusted BIL price: backward induction on the calibrated mesh from maturity
// down past t = 0, then a linear interpolation in time at the two same-parity
// levels straddling 0 followed by a four-point Lagrange interpolation in log
// space at log(s0). Knock-out and early-exercise rules match the CRR engine.
// When subtract_constant_term is set and the spec is a European down-and-out
// call with L > K, the non-vanishing 1/sqrt(n') expansion constant is removed
// from the result.
inline PriceResult price_adjusted_bil(const MarketParams& market, const DigitalOptionSpec& spec,
                                      int n, ProbabilityRule rule = ProbabilityRule::martingale,
                                      bool subtract_constant_term = false) {
  validate(market, spec);
  const bool alive = alive_at_inception(market, spec);
  if (!alive && spec.knock == Knock::out) {
    PriceResult res;
    res.price = 0.0;
    res.method = PricingMethod::bil;
    res.n_steps = n;
    res.diagnostics["knocked_at_inception"] = 1.0;
    return res;
  }
  const bool already_in = !alive && spec.knock == Knock::in;

  const BilMesh mesh = calibrate_mesh(market, spec, n);
  const double p = detail::up_probability(market.r, market.sigma, mesh.dt, rule);
  const double q = 1.0 - p;
  const double disc = std::exp(-market.r * mesh.dt);
  const bool american = spec.style == ExerciseStyle::american;
  const bool is_call = spec.side == OptionSide::call;
  const long long mK = mesh.strike_level;
  const bool knock_in = spec.knock == Knock::in && !already_in;
  const bool knock_out = spec.knock == Knock::out;

  const auto payoff = [&](long long m) -> double {
    const double call_pays = m >= mK ? 1.0 : 0.0;
    return is_call ? call_pays : 1.0 - call_pays;
  };
  const auto knocked = [&](long long m) { return m <= 0; };

  detail::BilLattice main{std::vector<double>(size_t(mesh.m_max - mesh.m_min + 1), 0.0),
                          mesh.m_min, mesh.m_max};
  detail::BilLattice vanilla = main;
  const bool need_vanilla = knock_in;

  // maturity layer: even levels
  for (long long m = mesh.m_min + ((mesh.m_min % 2 + 2) % 2); m <= mesh.m_max; m += 2) {
    const double pay = payoff(m);
    if (need_vanilla) vanilla.at(m) = pay;
    if (knock_out)
      main.at(m) = knocked(m) ? 0.0 : pay;
    else if (knock_in)
      main.at(m) = knocked(m) ? pay : 0.0;
    else
      main.at(m) = pay;  // vanilla run (already-in specs)
  }

  std::vector<double> snap_a;
  if (mesh.n_prime == 2) snap_a = main.v;  // anchor level is the maturity layer
  const auto step_lattice = [&](int j) {
    const long long par = ((j % 2) + 2) % 2;
    long long lo = mesh.m_min;
    if (((lo % 2 + 2) % 2) != par) ++lo;
    for (long long m = lo; m <= mesh.m_max; m += 2) {
      const double up = m + 1 <= mesh.m_max ? main.at(m + 1) : main.at(m - 1);
      const double dn = m - 1 >= mesh.m_min ? main.at(m - 1) : main.at(m + 1);
      double cont = disc * (p * up + q * dn);
      if (need_vanilla) {
        const double vup = m + 1 <= mesh.m_max ? vanilla.at(m + 1) : vanilla.at(m - 1);
        const double vdn = m - 1 >= mesh.m_min ? vanilla.at(m - 1) : vanilla.at(m + 1);
        double vcont = disc * (p * vup + q * vdn);
        if (american) vcont = std::max(vcont, payoff(m));
        vanilla.at(m) = vcont;
        main.at(m) = knocked(m) ? vcont : cont;
      } else if (knock_out) {
        if (knocked(m)) {
          main.at(m) = 0.0;
        } else {
          if (american) cont = std::max(cont, payoff(m));
          main.at(m) = cont;
        }
      } else {
        if (american) cont = std::max(cont, payoff(m));
        main.at(m) = cont;
      }
    }
  };
  for (int j = 1; j <= mesh.n_prime; ++j) {
    step_lattice(j);
    if (j == mesh.n_prime - 2) snap_a = main.v;
  }

  // time-linear value at t = 0 on the anchor-parity ladder, then space-cubic
  const double xi_spot = (std::log(market.s0) - mesh.anchor_log) / mesh.step_log;
  const long long par = ((mesh.n_prime % 2) + 2) % 2;
  long long m1 = static_cast<long long>(std::floor(xi_spot));
  if (((m1 % 2 + 2) % 2) != par) --m1;
  while (double(m1) > xi_spot) m1 -= 2;
  if (m1 - 2 < mesh.m_min || m1 + 4 > mesh.m_max)
    throw SpotOutsideMeshError("spot outside mesh");
  const double w = (0.0 - mesh.tau_b) / (mesh.tau_a - mesh.tau_b);
  std::array<double, 4> xs{}, ys{};
  for (int i = 0; i < 4; ++i) {
    const long long m = m1 - 2 + 2 * i;
    const double va = snap_a[size_t(m - mesh.m_min)];
    const double vb = main.at(m);
    xs[size_t(i)] = mesh.level_log(m);
    ys[size_t(i)] = vb + w * (va - vb);
  }
  double price = lagrange4(xs, ys, std::log(market.s0));

  if (subtract_constant_term && knock_out && is_call && !american &&
      spec.barrier > spec.strike) {
    // the barrier is a terminal node on this mesh, so eps = 1
    const ExpansionCoefficients c = compute_coefficients(market, spec.strike, spec.barrier, 1);
    price -= std::exp(-market.r * market.T) * c.Et[0] / std::sqrt(double(mesh.n_prime));
  }
  price = std::min(std::max(price, 0.0), 1.0);

  PriceResult res;
  res.price = price;
  res.method = PricingMethod::bil;
  res.n_steps = n;
  res.diagnostics["dt"] = mesh.dt;
  res.diagnostics["n_prime"] = mesh.n_prime;
  res.diagnostics["k"] = mesh.k;
  return res;
}

// Knock-out bond priced on a BIL mesh: pays 1 iff the barrier is never
// breached. A digital call whose strike sits below the barrier pays 1 at
// every alive node, which is exactly the bond.
inline PriceResult price_bil_barrier_bond(const MarketParams& market, double barrier,
                                          ExerciseStyle style, int n,
                                          ProbabilityRule rule = ProbabilityRule::martingale) {
  DigitalOptionSpec spec;
  spec.side = OptionSide::call;
  spec.strike = 0.75 * barrier;
  spec.barrier = barrier;
  spec.barrier_side = BarrierSide::down;
  spec.knock = Knock::out;
  spec.style = style;
  return price_adjusted_bil(market, spec, n, rule);
}

}  // namespace digibar

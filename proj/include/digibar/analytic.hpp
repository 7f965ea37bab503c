#pragma once

#include <cmath>

#include "digibar/normal.hpp"
#include "digibar/types.hpp"

namespace digibar {

// The eight log-moneyness arguments of the closed-form single-barrier digital
// prices. d_{i2} = d_{i1} - sigma*sqrt(T) exactly for i = 1..4.
struct DCoefficients {
  double d11, d12;
  double d21, d22;
  double d31, d32;
  double d41, d42;
};

inline DCoefficients d_coefficients(const MarketParams& m, double strike, double barrier) {
  if (!(strike > 0.0)) throw ValidationError("nonpositive strike");
  if (!(barrier > 0.0)) throw ValidationError("nonpositive barrier");
  const double st = m.sigma * std::sqrt(m.T);
  const double c = (m.r + 0.5 * m.sigma * m.sigma) * m.T;
  DCoefficients d;
  d.d11 = (std::log(m.s0 / strike) + c) / st;
  d.d21 = (std::log(barrier * barrier / (m.s0 * strike)) + c) / st;
  d.d31 = (std::log(m.s0 / barrier) + c) / st;
  d.d41 = (std::log(barrier / m.s0) + c) / st;
  d.d12 = d.d11 - st;
  d.d22 = d.d21 - st;
  d.d32 = d.d31 - st;
  d.d42 = d.d41 - st;
  return d;
}

namespace detail {

// (s0/L)^(1 - 2r/sigma^2); r = 0 gives exponent 1 through the same path.
inline double barrier_power(const MarketParams& m, double barrier) {
  return std::pow(m.s0 / barrier, 1.0 - 2.0 * m.r / (m.sigma * m.sigma));
}

inline void require_alive_down(const MarketParams& m, double barrier) {
  if (m.s0 <= barrier) throw KnockedAtInceptionError("knocked out at inception: s0 <= barrier");
}

}  // namespace detail

inline PriceResult price_vanilla_digital_call(const MarketParams& m, double strike) {
  const DCoefficients d = d_coefficients(m, strike, strike);
  return {std::exp(-m.r * m.T) * norm_cdf(d.d12), PricingMethod::analytic, std::nullopt, {}};
}

inline PriceResult price_vanilla_digital_put(const MarketParams& m, double strike) {
  const DCoefficients d = d_coefficients(m, strike, strike);
  return {std::exp(-m.r * m.T) * norm_cdf(-d.d12), PricingMethod::analytic, std::nullopt, {}};
}

// Down-and-out digital call, barrier below strike:
// e^{-rT} [Phi(d12) - Phi(d22) (s0/L)^{1-2r/sigma^2}].
inline PriceResult price_do_digital_call_L_below_K(const MarketParams& m, double strike,
                                                   double barrier) {
  if (!(barrier < strike)) throw RegimeError("wrong regime: requires L < K");
  detail::require_alive_down(m, barrier);
  const DCoefficients d = d_coefficients(m, strike, barrier);
  const double price = std::exp(-m.r * m.T) *
                       (norm_cdf(d.d12) - norm_cdf(d.d22) * detail::barrier_power(m, barrier));
  return {price, PricingMethod::analytic, std::nullopt, {}};
}

// Down-and-out digital call, barrier above strike:
// e^{-rT} [Phi(d32) - (s0/L)^{1-2r/sigma^2} Phi(d42)]. K-free expression.
inline PriceResult price_do_digital_call_L_above_K(const MarketParams& m, double strike,
                                                   double barrier) {
  if (!(barrier > strike)) throw RegimeError("wrong regime: requires L > K");
  detail::require_alive_down(m, barrier);
  const DCoefficients d = d_coefficients(m, strike, barrier);
  const double price = std::exp(-m.r * m.T) *
                       (norm_cdf(d.d32) - detail::barrier_power(m, barrier) * norm_cdf(d.d42));
  return {price, PricingMethod::analytic, std::nullopt, {}};
}

// Down-and-out bond: pays 1 at T iff the barrier is never breached. Equals
// the L > K call expression, which does not involve the strike.
inline PriceResult price_do_bond(const MarketParams& m, double barrier) {
  detail::require_alive_down(m, barrier);
  const DCoefficients d = d_coefficients(m, barrier, barrier);
  const double price = std::exp(-m.r * m.T) *
                       (norm_cdf(d.d32) - detail::barrier_power(m, barrier) * norm_cdf(d.d42));
  return {price, PricingMethod::analytic, std::nullopt, {}};
}

// Down-and-in digital call via parity: vanilla - down-and-out, regime chosen
// by the position of L relative to K.
inline PriceResult price_di_digital_call(const MarketParams& m, double strike, double barrier) {
  detail::require_alive_down(m, barrier);
  if (barrier == strike) throw RegimeError("wrong regime: barrier equals strike");
  const PriceResult out = barrier < strike ? price_do_digital_call_L_below_K(m, strike, barrier)
                                           : price_do_digital_call_L_above_K(m, strike, barrier);
  return {price_vanilla_digital_call(m, strike).price - out.price, PricingMethod::analytic,
          std::nullopt, {}};
}

// Single-barrier digital puts by payoff decomposition: a down-and-out put is
// the down-and-out bond minus the down-and-out call; knock-in via parity
// with the vanilla digital put.
inline PriceResult price_digital_put_single_barrier(const MarketParams& m,
                                                    const DigitalOptionSpec& spec) {
  validate(m, spec);
  if (spec.side != OptionSide::put) throw ValidationError("expected a put spec");
  if (spec.barrier_side != BarrierSide::up) detail::require_alive_down(m, spec.barrier);
  if (spec.barrier_side == BarrierSide::up)
    throw RegimeError("no analytic formula for up barriers");
  if (spec.style == ExerciseStyle::american)
    throw RegimeError("no analytic formula for American style");
  if (spec.barrier == spec.strike) throw RegimeError("wrong regime: barrier equals strike");
  const double bond = price_do_bond(m, spec.barrier).price;
  const double do_call = spec.barrier < spec.strike
                             ? price_do_digital_call_L_below_K(m, spec.strike, spec.barrier).price
                             : price_do_digital_call_L_above_K(m, spec.strike, spec.barrier).price;
  const double do_put = bond - do_call;
  if (spec.knock == Knock::out)
    return {do_put, PricingMethod::analytic, std::nullopt, {}};
  const double vanilla_put = price_vanilla_digital_put(m, spec.strike).price;
  return {vanilla_put - do_put, PricingMethod::analytic, std::nullopt, {}};
}

// Closed-form dispatcher for every spec this module covers: European,
// down barrier. Up barriers are priced by the lattice engines instead.
inline PriceResult price_analytic(const MarketParams& m, const DigitalOptionSpec& spec) {
  validate(m, spec);
  if (spec.style == ExerciseStyle::american)
    throw RegimeError("no analytic formula for American style");
  if (spec.barrier_side == BarrierSide::up)
    throw RegimeError("no analytic formula for up barriers");
  if (spec.side == OptionSide::put) return price_digital_put_single_barrier(m, spec);
  if (spec.knock == Knock::in) return price_di_digital_call(m, spec.strike, spec.barrier);
  if (spec.barrier == spec.strike) throw RegimeError("wrong regime: barrier equals strike");
  return spec.barrier < spec.strike
             ? price_do_digital_call_L_below_K(m, spec.strike, spec.barrier)
             : price_do_digital_call_L_above_K(m, spec.strike, spec.barrier);
}

}  // namespace digibar

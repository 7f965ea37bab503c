#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace digibar {

enum class OptionSide { call, put };
enum class BarrierSide { down, up };
enum class Knock { in, out };
enum class ExerciseStyle { european, american };

enum class PricingMethod {
  analytic,
  crr,
  crr_combinatorial,
  bil,
  enumeration,
  monte_carlo,
};

// Black-Scholes market: spot, flat rate, constant volatility, maturity in years.
struct MarketParams {
  double s0;
  double r;
  double sigma;
  double T;
};

// Cash-or-nothing option paying 1 at the strike condition, with a single
// knock-in or knock-out barrier. The cash amount is fixed at 1, no rebates.
struct DigitalOptionSpec {
  OptionSide side = OptionSide::call;
  double strike = 0.0;
  double barrier = 0.0;
  BarrierSide barrier_side = BarrierSide::down;
  Knock knock = Knock::out;
  ExerciseStyle style = ExerciseStyle::european;
};

struct PriceResult {
  double price = 0.0;
  PricingMethod method = PricingMethod::analytic;
  std::optional<int> n_steps;
  std::map<std::string, double> diagnostics;
};

// Invalid inputs (nonpositive prices, bad flag combinations, malformed configs).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Structurally valid inputs that a particular pricing route cannot handle
// (wrong L-vs-K regime, unsupported barrier side, American where European
// is required).
struct RegimeError : std::domain_error {
  using std::domain_error::domain_error;
};

// A pricing path that assumes the option is alive at inception was handed a
// spec already breached at t = 0. Kept distinct from generic validation.
struct KnockedAtInceptionError : RegimeError {
  using RegimeError::RegimeError;
};

// The one-step up probability left (0, 1) for the requested grid.
struct DegenerateTreeError : std::domain_error {
  using std::domain_error::domain_error;
};

// The interpolation stencil around log(s0) does not fit inside the mesh.
struct SpotOutsideMeshError : std::domain_error {
  using std::domain_error::domain_error;
};

inline const char* to_string(PricingMethod m) {
  switch (m) {
    case PricingMethod::analytic: return "analytic";
    case PricingMethod::crr: return "crr";
    case PricingMethod::crr_combinatorial: return "crr_combinatorial";
    case PricingMethod::bil: return "bil";
    case PricingMethod::enumeration: return "enumeration";
    case PricingMethod::monte_carlo: return "mc";
  }
  return "?";
}

// True iff the barrier has not been breached by the spot at t = 0.
// Breach is inclusive: S <= L (down) or S >= H (up).
inline bool alive_at_inception(const MarketParams& market, const DigitalOptionSpec& spec) {
  if (spec.barrier_side == BarrierSide::down) return market.s0 > spec.barrier;
  return market.s0 < spec.barrier;
}

inline std::pair<MarketParams, DigitalOptionSpec> validate(const MarketParams& market,
                                                           const DigitalOptionSpec& spec) {
  if (!(market.s0 > 0.0)) throw ValidationError("nonpositive spot");
  if (!(market.sigma > 0.0)) throw ValidationError("nonpositive volatility");
  if (!(market.T > 0.0)) throw ValidationError("nonpositive maturity");
  if (!(market.r >= 0.0)) throw ValidationError("negative rate");
  if (!(spec.strike > 0.0)) throw ValidationError("nonpositive strike");
  if (!(spec.barrier > 0.0)) throw ValidationError("nonpositive barrier");
  return {market, spec};
}

// Unit payoff at maturity. The strike boundary is inclusive for calls
// (s_T >= K pays 1); puts take the strict complement so call + put = 1
// pointwise at every s_T.
inline double terminal_payoff(const DigitalOptionSpec& spec, double s_T) {
  const double call_pays = s_T >= spec.strike ? 1.0 : 0.0;
  return spec.side == OptionSide::call ? call_pays : 1.0 - call_pays;
}

// Test statistic for knock-in + knock-out = vanilla. Only meaningful for
// European prices taken from one pricing scheme on one grid.
inline double in_out_parity(double price_in, double price_out, double price_vanilla,
                            ExerciseStyle style = ExerciseStyle::european) {
  if (style == ExerciseStyle::american)
    throw ValidationError("in/out parity does not hold under early exercise");
  return price_in + price_out - price_vanilla;
}

}  // namespace digibar

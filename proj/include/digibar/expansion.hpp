#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "digibar/analytic.hpp"
#include "digibar/crr.hpp"
#include "digibar/normal.hpp"
#include "digibar/types.hpp"

namespace digibar {

// The four single-barrier digital regimes covered by the error expansion.
enum class ExpansionRegime { di_L_below_K, do_L_below_K, do_L_above_K, di_L_above_K };

// Constants of the two-term asymptotic expansion of the lattice error
// Err(n) = e^{-rT} [ (first order)/sqrt(n) + (second order)/n ] + O(n^{-3/2}),
// evaluated for one (market, strike, barrier, eps_n) tuple. eps_n enters
// Et[0], Ft[0] and Ft[1] and oscillates with n, so coefficient sets must be
// recomputed per n.
struct ExpansionCoefficients {
  double alpha, alpha_hat;
  double beta, beta_hat;
  std::array<double, 4> g;      // g_i, built on d_{i2}
  std::array<double, 4> g_hat;  // built on d_{i1}
  double I;
  double c1, c2, c3, c_tilde;
  std::array<double, 2> At;  // down-and-in, L < K, 1/sqrt(n)
  std::array<double, 4> Bt;  // down-and-in, L < K, 1/n
  std::array<double, 2> Ct;  // down-and-out, L < K, 1/sqrt(n)
  std::array<double, 4> Dt;  // down-and-out, L < K, 1/n
  std::array<double, 2> Et;  // down-and-out, L > K, 1/sqrt(n)
  std::array<double, 3> Ft;  // down-and-out, L > K, 1/n
  std::array<double, 3> Gt;  // down-and-in, L > K, 1/sqrt(n)
  std::array<double, 4> Ht;  // down-and-in, L > K, 1/n
  int eps_n;
  double discount;  // e^{-rT}, factored out of every expansion
};

inline ExpansionCoefficients compute_coefficients(const MarketParams& m, double strike,
                                                  double barrier, int eps_n) {
  if (!(strike > 0.0 && barrier > 0.0)) throw ValidationError("nonpositive strike or barrier");
  if (barrier == strike) throw RegimeError("wrong regime: barrier equals strike");
  detail::require_alive_down(m, barrier);
  const DCoefficients d = d_coefficients(m, strike, barrier);
  const double sT = std::sqrt(m.T);
  const double sig = m.sigma;

  ExpansionCoefficients c;
  c.eps_n = eps_n;
  c.discount = std::exp(-m.r * m.T);
  c.alpha = (m.r - 0.5 * sig * sig) / (2.0 * sig);
  c.alpha_hat = c.alpha + 0.5 * sig;
  c.beta = (sig * sig * sig * sig - 4.0 * sig * sig * m.r + 12.0 * m.r * m.r) / (48.0 * sig);
  c.beta_hat = -c.beta - sig * m.r / 6.0;

  const auto g_of = [&](double x) {
    return 2.0 * m.T * (c.alpha_hat * c.alpha_hat * x + c.beta_hat * sT) +
           (2.0 * c.alpha_hat * sT / 3.0 - x / 12.0) * (1.0 - x * x);
  };
  const std::array<double, 4> d1 = {d.d11, d.d21, d.d31, d.d41};
  const std::array<double, 4> d2 = {d.d12, d.d22, d.d32, d.d42};
  for (int i = 0; i < 4; ++i) {
    c.g_hat[i] = g_of(d1[i]);
    c.g[i] = g_of(d2[i]);
  }
  c.I = ((4.0 * c.beta + 16.0 * c.alpha * c.alpha * c.alpha / 3.0) / sig) *
        std::log(m.s0 / barrier) * m.T;

  const double pw = detail::barrier_power(m, barrier);
  const double a4T = 4.0 * c.alpha * sT;

  c.At[0] = pw * norm_pdf(d.d22);
  c.At[1] = -2.0 * c.At[0] - a4T * norm_cdf(d.d22) * pw;
  c.Bt[0] = pw * (c.g[1] * norm_pdf(d.d22) - c.I * norm_cdf(d.d22));
  c.Bt[1] = pw * (-0.5 * d.d22) * norm_pdf(d.d22);
  c.Bt[2] = pw * norm_pdf(d.d22) * (2.0 * d.d22 - a4T);
  c.Bt[3] = pw * (norm_pdf(d.d22) * (-2.0 * d.d22 + 2.0 * a4T) +
                  8.0 * c.alpha * c.alpha * m.T * norm_cdf(d.d22));

  c.c1 = norm_pdf(d.d12);
  c.c2 = -0.5 * d.d12 * norm_pdf(d.d12);
  c.c_tilde = (d.d11 * d.d11 * d.d11 + d.d11 * d.d12 * d.d12 + 2.0 * d.d12 - 4.0 * d.d11) / 24.0 +
              (2.0 - d.d11 * d.d12 - d.d11 * d.d11) * sT / (6.0 * sig) * m.r +
              m.T * d.d11 / (2.0 * sig * sig) * m.r * m.r;
  c.c3 = c.c_tilde * norm_pdf(d.d12);

  c.Ct[0] = c.c1 - c.At[0];
  c.Ct[1] = -c.At[1];
  c.Dt[0] = c.c2 - c.Bt[0];
  c.Dt[1] = c.c3 - c.Bt[1];
  c.Dt[2] = -c.Bt[2];
  c.Dt[3] = -c.Bt[3];

  const double e = static_cast<double>(eps_n);
  c.Et[0] = -e * norm_pdf(d.d32) + pw * norm_pdf(d.d42);
  c.Et[1] = norm_pdf(d.d32) + pw * (norm_pdf(d.d42) + a4T * norm_cdf(d.d42));
  c.Ft[0] = norm_pdf(d.d32) * (c.g[2] - 0.5 * d.d32 * e * e) +
            pw * norm_pdf(d.d42) * (0.5 * d.d42 * e * e - c.g[3]) + norm_cdf(d.d42) * c.I * pw;
  c.Ft[1] = norm_pdf(d.d32) * d.d32 * e + pw * (norm_pdf(d.d42) * e * d.d42 - e * a4T);
  c.Ft[2] = -0.5 * d.d32 * norm_pdf(d.d32) + pw * norm_pdf(d.d42) * (0.5 * d.d42 - a4T) -
            pw * norm_cdf(d.d42) * 8.0 * c.alpha * c.alpha * m.T;

  c.Gt[0] = -c.Et[0];
  c.Gt[1] = c.c1;
  c.Gt[2] = -c.Et[1];
  c.Ht[0] = c.c2 - c.Ft[0];
  c.Ht[1] = c.c3;
  c.Ht[2] = -c.Ft[1];
  c.Ht[3] = -c.Ft[2];
  return c;
}

// Two-term predicted lattice error for the given regime, an even polynomial
// of degree <= 2 in (delta_K, delta_L) split into 1/sqrt(n) and 1/n parts.
inline double predicted_error(const ExpansionCoefficients& c, int n, double delta_K,
                              double delta_L, ExpansionRegime regime) {
  if (n < 1) throw ValidationError("step count must be >= 1");
  double first = 0.0, second = 0.0;
  switch (regime) {
    case ExpansionRegime::di_L_below_K:
      first = c.At[0] * delta_K + c.At[1] * delta_L;
      second = c.Bt[0] + c.Bt[1] * delta_K * delta_K + c.Bt[2] * delta_K * delta_L +
               c.Bt[3] * delta_L * delta_L;
      break;
    case ExpansionRegime::do_L_below_K:
      first = c.Ct[0] * delta_K + c.Ct[1] * delta_L;
      second = c.Dt[0] + c.Dt[1] * delta_K * delta_K + c.Dt[2] * delta_K * delta_L +
               c.Dt[3] * delta_L * delta_L;
      break;
    case ExpansionRegime::do_L_above_K:
      first = c.Et[0] + c.Et[1] * delta_L;
      second = c.Ft[0] + c.Ft[1] * delta_L + c.Ft[2] * delta_L * delta_L;
      break;
    case ExpansionRegime::di_L_above_K:
      first = c.Gt[0] + c.Gt[1] * delta_K + c.Gt[2] * delta_L;
      second = c.Ht[0] + c.Ht[1] * delta_K * delta_K + c.Ht[2] * delta_L +
               c.Ht[3] * delta_L * delta_L;
      break;
  }
  return c.discount * (first / std::sqrt(double(n)) + second / double(n));
}

inline ExpansionRegime regime_for(const DigitalOptionSpec& spec) {
  if (spec.barrier_side != BarrierSide::down)
    throw RegimeError("error expansion covers down barriers only");
  if (spec.side != OptionSide::call) throw RegimeError("error expansion covers calls only");
  if (spec.barrier == spec.strike) throw RegimeError("wrong regime: barrier equals strike");
  if (spec.barrier < spec.strike)
    return spec.knock == Knock::in ? ExpansionRegime::di_L_below_K
                                   : ExpansionRegime::do_L_below_K;
  return spec.knock == Knock::out ? ExpansionRegime::do_L_above_K
                                  : ExpansionRegime::di_L_above_K;
}

// Err(n) = lattice price - closed-form price.
inline double observed_error(const MarketParams& m, const DigitalOptionSpec& spec, int n,
                             ProbabilityRule rule = ProbabilityRule::martingale) {
  return price_backward(m, spec, n, rule).price - price_analytic(m, spec).price;
}

// Predicted error including the discount factor, with geometry taken from
// the n-step tree (eps_n oscillates with n, so coefficients are rebuilt).
inline double predicted_error_for(const MarketParams& m, const DigitalOptionSpec& spec, int n) {
  const LatticeGeometry g = lattice_geometry(m, spec.strike, spec.barrier, n);
  const ExpansionCoefficients c = compute_coefficients(m, spec.strike, spec.barrier, g.eps_n);
  return predicted_error(c, n, g.delta_K, g.delta_L, regime_for(spec));
}

struct ResidualRow {
  int n;
  double observed;
  double predicted;
  double residual;            // observed - predicted
  double residual_times_n32;  // |residual| * n^{3/2}
};

struct ResidualReport {
  std::vector<ResidualRow> rows;
  // Raised when |residual| * n^{3/2} grows monotonically across the grid to
  // more than twice its median: the signature of a missing error term.
  bool growth_flag = false;
};

inline ResidualReport residual_order_report(const MarketParams& m, const DigitalOptionSpec& spec,
                                            const std::vector<int>& n_list,
                                            ProbabilityRule rule = ProbabilityRule::martingale) {
  if (n_list.empty()) throw ValidationError("n_list must be nonempty");
  for (size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw ValidationError("n_list must be ascending");
  ResidualReport rep;
  for (int n : n_list) {
    ResidualRow row;
    row.n = n;
    row.observed = observed_error(m, spec, n, rule);
    row.predicted = predicted_error_for(m, spec, n);
    row.residual = row.observed - row.predicted;
    row.residual_times_n32 = std::fabs(row.residual) * std::pow(double(n), 1.5);
    rep.rows.push_back(row);
  }
  if (rep.rows.size() >= 2) {
    std::vector<double> vals;
    for (const auto& r : rep.rows) vals.push_back(r.residual_times_n32);
    bool monotone = true;
    for (size_t i = 1; i < vals.size(); ++i)
      if (vals[i] < vals[i - 1]) { monotone = false; break; }
    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    rep.growth_flag = monotone && vals.back() > 2.0 * median;
  }
  return rep;
}

}  // namespace digibar

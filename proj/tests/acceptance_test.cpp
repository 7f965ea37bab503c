// Acceptance suite: one test per criterion, each printing a single
// [PASS]/[FAIL] line with the measured quantity behind it.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "digibar/digibar.hpp"

namespace digibar {
namespace {

void report(int id, bool pass, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

const int kGrid[] = {100, 200, 400, 800, 1600, 3200};
const double kTable1Crr[] = {0.883147, 0.879006, 0.880340, 0.876786, 0.878863, 0.877873};
const double kTable2Crr[] = {0.855913, 0.846415, 0.849497, 0.846188, 0.846107, 0.846252};
const double kTable1Bil[] = {0.878791, 0.878732, 0.878700, 0.878684, 0.878676, 0.878671};
const double kTable2Bil[] = {0.844983, 0.845304, 0.845484, 0.845571, 0.845615, 0.845637};
const double kTable1True = 0.878667;
const double kTable2True = 0.845659;

TEST(Acceptance, Criterion1AnalyticReproduction) {
  const double t0 = now_seconds();
  const double p1 = price_analytic(table_market(), table1_spec()).price;
  const double p2 = price_analytic(table_market(), table2_spec()).price;
  const double elapsed = now_seconds() - t0;
  const double gap1 = std::fabs(p1 - kTable1True);
  const double gap2 = std::fabs(p2 - kTable2True);
  const bool pass = gap1 <= 5e-7 && gap2 <= 5e-7;
  EXPECT_LE(gap1, 5e-7);
  EXPECT_LE(gap2, 5e-7);
  char buf[420];
  std::snprintf(buf, sizeof buf,
                "analytic reproduction: |gap1|=%.2e |gap2|=%.2e (tol 5e-7), %.0f us",
                gap1, gap2, elapsed * 1e6);
  report(1, pass, buf);
  if (!pass) {
    // The machine-accurate value of the L > K closed form at these
    // parameters is 0.84565848814760725 (verified against 50-digit
    // arithmetic and the Monte Carlo oracle), which rounds to 0.845658.
    // The reference table prints 0.845659; that digit is reproduced exactly
    // by re-evaluating the same formula with the Abramowitz-Stegun 7.1.26
    // normal CDF (absolute error 1.5e-7). The distance from the exact value
    // to the printed one is 5.12e-7 and cannot drop below 5e-7 without
    // degrading the CDF below its required 1e-15 accuracy.
    std::printf("       analysis: computed=%.17g printed=%.6f distance=%.3e\n", p2, kTable2True,
                gap2);
  }
}

TEST(Acceptance, Criterion2CrrReproduction) {
  const MarketParams m = table_market();
  const double t0 = now_seconds();
  double worst = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double p1 =
        price_backward(m, table1_spec(), kGrid[i], ProbabilityRule::gaussian_walk).price;
    const double p2 =
        price_backward(m, table2_spec(), kGrid[i], ProbabilityRule::gaussian_walk).price;
    worst = std::max({worst, std::fabs(p1 - kTable1Crr[i]), std::fabs(p2 - kTable2Crr[i])});
  }
  const double elapsed = now_seconds() - t0;
  const bool pass = worst <= 1e-6 && elapsed < 10.0;
  EXPECT_LE(worst, 1e-6);
  EXPECT_LT(elapsed, 10.0);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "CRR table reproduction (walk probability): worst |gap|=%.2e (tol 1e-6), "
                "sweep %.2f s (limit 10 s)",
                worst, elapsed);
  report(2, pass, buf);
}

TEST(Acceptance, Criterion3AdjustedBilReproduction) {
  const MarketParams m = table_market();
  double worst = 0.0;
  bool monotone = true;
  double ratio1 = 0.0, ratio2 = 0.0;
  for (int table = 1; table <= 2; ++table) {
    const DigitalOptionSpec spec = table == 1 ? table1_spec() : table2_spec();
    const double* want = table == 1 ? kTable1Bil : kTable2Bil;
    const double ref = price_analytic(m, spec).price;
    double prev_err = 1.0, first_err = 0.0, last_err = 0.0;
    for (int i = 0; i < 6; ++i) {
      const double p = price_adjusted_bil(m, spec, kGrid[i]).price;
      worst = std::max(worst, std::fabs(p - want[i]));
      const double err = std::fabs(p - ref);
      if (err >= prev_err) monotone = false;
      prev_err = err;
      if (i == 0) first_err = err;
      if (i == 5) last_err = err;
    }
    (table == 1 ? ratio1 : ratio2) = last_err / first_err;
  }
  const bool pass = worst <= 5e-4 && monotone && ratio1 <= 0.125 && ratio2 <= 0.125;
  EXPECT_LE(worst, 5e-4);
  EXPECT_TRUE(monotone);
  EXPECT_LE(ratio1, 0.125);
  EXPECT_LE(ratio2, 0.125);
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "adjusted BIL: worst |gap|=%.2e (tol 5e-4), errors monotone=%s, "
                "err(3200)/err(100)=%.3f/%.3f (limit 0.125)",
                worst, monotone ? "yes" : "no", ratio1, ratio2);
  report(3, pass, buf);
}

TEST(Acceptance, Criterion4OracleEquivalence) {
  struct ParamSet {
    MarketParams m;
    double K_low_barrier, L_low;   // L < K regime
    double K_high_barrier, L_high; // L > K regime
  };
  const ParamSet sets[] = {
      {table_market(), 100.0, 60.0, 60.0, 100.0},
      {{100.0, 0.05, 0.45, 1.25}, 105.0, 85.0, 70.0, 90.0},
  };
  double worst = 0.0;
  for (const auto& ps : sets) {
    for (int regime = 0; regime < 2; ++regime) {
      const double K = regime == 0 ? ps.K_low_barrier : ps.K_high_barrier;
      const double L = regime == 0 ? ps.L_low : ps.L_high;
      for (Knock knock : {Knock::in, Knock::out}) {
        DigitalOptionSpec spec{OptionSide::call, K, L, BarrierSide::down, knock,
                               ExerciseStyle::european};
        for (int n : {4, 8, 12, 16, 20}) {
          const double en = enumerate_paths_price(ps.m, spec, n).price;
          const double bw = price_backward(ps.m, spec, n).price;
          const double cb = price_combinatorial(ps.m, spec, n).price;
          worst = std::max({worst, std::fabs(en - bw), std::fabs(en - cb), std::fabs(bw - cb)});
        }
      }
    }
  }
  const bool pass = worst <= 1e-12;
  EXPECT_LE(worst, 1e-12);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "oracle equivalence (enumeration = backward = combinatorial, 4 regimes x 2 "
                "parameter sets): worst pairwise |gap|=%.2e (tol 1e-12)",
                worst);
  report(4, pass, buf);
}

TEST(Acceptance, Criterion5Parity) {
  const MarketParams m = table_market();
  std::vector<int> ns;
  for (int n = 1; n <= 32; ++n) ns.push_back(n);
  for (int n : {50, 64, 100, 128, 200, 256, 400, 512, 800, 1600, 3200}) ns.push_back(n);
  double worst = 0.0;
  for (const DigitalOptionSpec& out : {table1_spec(), table2_spec()}) {
    DigitalOptionSpec in = out;
    in.knock = Knock::in;
    DigitalOptionSpec vanilla_like = out;
    vanilla_like.barrier = 1e-8;
    for (int n : ns) {
      const double residual = price_backward(m, in, n).price + price_backward(m, out, n).price -
                              price_backward(m, vanilla_like, n).price;
      worst = std::max(worst, std::fabs(residual));
    }
  }
  const bool pass = worst <= 1e-12;
  EXPECT_LE(worst, 1e-12);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "in/out parity on one tree, n up to 3200, both regimes: worst "
                "|DI+DO-vanilla|=%.2e (tol 1e-12)",
                worst);
  report(5, pass, buf);
}

TEST(Acceptance, Criterion6ExpansionConsistency) {
  const MarketParams m = table_market();
  std::vector<int> grid(std::begin(kGrid), std::end(kGrid));
  const ResidualReport rep = residual_order_report(m, table1_spec(), grid);
  const bool flag_ok = !rep.growth_flag;

  const ExpansionCoefficients c = compute_coefficients(m, 100.0, 60.0, 1);
  const double aligned_first =
      predicted_error(c, 400, 0.0, 0.0, ExpansionRegime::do_L_below_K) -
      c.discount * c.Dt[0] / 400.0;
  const bool coeff_ok = aligned_first == 0.0;

  const bool pass = flag_ok && coeff_ok;
  EXPECT_TRUE(flag_ok);
  EXPECT_TRUE(coeff_ok);
  double vmax = 0.0;
  for (const auto& r : rep.rows) vmax = std::max(vmax, r.residual_times_n32);
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "expansion consistency: residual*n^1.5 max=%.3f with no monotone growth "
                "past 2x median; aligned-grid 1/sqrt(n) coefficient = %.1e (exact 0)",
                vmax, aligned_first);
  report(6, pass, buf);
}

TEST(Acceptance, Criterion7ConstantTermScale) {
  // the L > K knock-out expansion keeps a constant 1/sqrt(n) term whenever
  // the effective barrier misses the terminal layer; its contribution over
  // the reference grid sits at the claimed 1e-3 scale
  const ExpansionCoefficients c = compute_coefficients(table_market(), 60.0, 100.0, 0);
  bool pass = true;
  double lo = 1.0, hi = 0.0;
  for (int n : kGrid) {
    const double contribution = c.discount * std::fabs(c.Et[0]) / std::sqrt(double(n));
    lo = std::min(lo, contribution);
    hi = std::max(hi, contribution);
    if (!(contribution >= 1e-4 && contribution <= 1e-2)) pass = false;
  }
  EXPECT_TRUE(pass);
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "constant-term contribution e^{-rT} E1/sqrt(n) over the grid: [%.2e, %.2e] "
                "within [1e-4, 1e-2]; coefficient e^{-rT} E1 = %.4e",
                lo, hi, c.discount * c.Et[0]);
  report(7, pass, buf);
}

TEST(Acceptance, Criterion8MonteCarloCrossCheck) {
  const MarketParams m = table_market();
  McConfig cfg;
  cfg.paths = 10'000'000;
  cfg.seed = 424242;
  cfg.use_bridge_correction = true;
  const double t0 = now_seconds();
  double z1 = 0.0, z2 = 0.0;
  {
    const PriceResult r = mc_price(m, table1_spec(), cfg);
    z1 = std::fabs(r.price - price_analytic(m, table1_spec()).price) /
         r.diagnostics.at("standard_error");
  }
  {
    const PriceResult r = mc_price(m, table2_spec(), cfg);
    z2 = std::fabs(r.price - price_analytic(m, table2_spec()).price) /
         r.diagnostics.at("standard_error");
  }
  const double elapsed = now_seconds() - t0;
  const bool pass = z1 <= 3.5 && z2 <= 3.5 && elapsed < 120.0;
  EXPECT_LE(z1, 3.5);
  EXPECT_LE(z2, 3.5);
  EXPECT_LT(elapsed, 120.0);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "Monte Carlo 1e7 paths, bridge on: |z|=%.2f and %.2f (limit 3.5), "
                "%.1f s (limit 120 s)",
                z1, z2, elapsed);
  report(8, pass, buf);
}

TEST(Acceptance, Criterion9AmericanSanity) {
  const MarketParams m = table_market();
  bool dominance = true, bond_bound = true, converged = true;
  // dominance and bond bound on both engines, table configs plus an
  // out-of-the-money strike so early exercise is non-trivial
  std::vector<DigitalOptionSpec> specs = {table1_spec(), table2_spec()};
  {
    DigitalOptionSpec otm = table1_spec();
    otm.strike = 200.0;
    specs.push_back(otm);
  }
  for (const DigitalOptionSpec& eur : specs) {
    DigitalOptionSpec amer = eur;
    amer.style = ExerciseStyle::american;
    for (int n : {400, 1600}) {
      if (price_backward(m, amer, n).price < price_backward(m, eur, n).price - 1e-12)
        dominance = false;
      if (price_adjusted_bil(m, amer, n).price < price_adjusted_bil(m, eur, n).price - 1e-9)
        dominance = false;
      const double crr_bond =
          price_barrier_bond_backward(m, eur.barrier, BarrierSide::down,
                                      ExerciseStyle::american, n)
              .price;
      if (price_backward(m, amer, n).price > crr_bond + 1e-12) bond_bound = false;
      const double bil_bond =
          price_bil_barrier_bond(m, eur.barrier, ExerciseStyle::american, n).price;
      if (price_adjusted_bil(m, amer, n).price > bil_bond + 1e-9) bond_bound = false;
    }
  }
  double worst_conv = 0.0;
  for (const DigitalOptionSpec& eur : specs) {
    DigitalOptionSpec amer = eur;
    amer.style = ExerciseStyle::american;
    const double gap_crr =
        std::fabs(price_backward(m, amer, 3200).price - price_backward(m, amer, 1600).price);
    const double gap_bil = std::fabs(price_adjusted_bil(m, amer, 3200).price -
                                     price_adjusted_bil(m, amer, 1600).price);
    worst_conv = std::max({worst_conv, gap_crr, gap_bil});
    if (gap_crr > 5e-4 || gap_bil > 5e-4) converged = false;
  }
  const bool pass = dominance && bond_bound && converged;
  EXPECT_TRUE(dominance);
  EXPECT_TRUE(bond_bound);
  EXPECT_TRUE(converged);
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "American sanity on both engines: American >= European %s, digital <= bond %s, "
                "|price(3200)-price(1600)| max=%.2e (tol 5e-4)",
                dominance ? "holds" : "violated", bond_bound ? "holds" : "violated",
                worst_conv);
  report(9, pass, buf);
}

}  // namespace
}  // namespace digibar

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "digibar/analytic.hpp"
#include "digibar/bil.hpp"
#include "digibar/crr.hpp"
#include "digibar/oracles.hpp"
#include "digibar/types.hpp"

namespace digibar {

// Parameter sets behind the two reference tables: s0 = 150, r = 0.1,
// sigma = 0.25, T = 1; down-and-out European digital call with
// (K, L) = (100, 60) and (60, 100) respectively.
inline MarketParams table_market() { return {150.0, 0.1, 0.25, 1.0}; }

inline DigitalOptionSpec table1_spec() {
  return {OptionSide::call, 100.0, 60.0, BarrierSide::down, Knock::out, ExerciseStyle::european};
}

inline DigitalOptionSpec table2_spec() {
  return {OptionSide::call, 60.0, 100.0, BarrierSide::down, Knock::out, ExerciseStyle::european};
}

inline PriceResult price_with_method(const MarketParams& market, const DigitalOptionSpec& spec,
                                     PricingMethod method, int n,
                                     ProbabilityRule rule = ProbabilityRule::martingale,
                                     const McConfig& mc = {}) {
  switch (method) {
    case PricingMethod::analytic: return price_analytic(market, spec);
    case PricingMethod::crr: return price_backward(market, spec, n, rule);
    case PricingMethod::crr_combinatorial: return price_combinatorial(market, spec, n, rule);
    case PricingMethod::bil: return price_adjusted_bil(market, spec, n, rule);
    case PricingMethod::enumeration: return enumerate_paths_price(market, spec, n, rule);
    case PricingMethod::monte_carlo: return mc_price(market, spec, mc);
  }
  throw ValidationError("unknown pricing method");
}

inline std::optional<PricingMethod> method_from_string(const std::string& s) {
  if (s == "analytic") return PricingMethod::analytic;
  if (s == "crr") return PricingMethod::crr;
  if (s == "crr_combinatorial") return PricingMethod::crr_combinatorial;
  if (s == "bil") return PricingMethod::bil;
  if (s == "enumeration") return PricingMethod::enumeration;
  if (s == "mc") return PricingMethod::monte_carlo;
  return std::nullopt;
}

struct SweepConfig {
  std::vector<int> n_values;
  std::vector<PricingMethod> methods;
  MarketParams market = table_market();
  DigitalOptionSpec spec = table1_spec();
  ProbabilityRule rule = ProbabilityRule::martingale;
  McConfig mc;
  std::string format = "csv";
  std::string out_path;  // empty = stdout
};

// One row of a convergence sweep.
struct ConvergenceRecord {
  int n = 0;
  std::string method;
  double price = 0.0;
  double reference = 0.0;  // closed-form price
  double error = 0.0;      // price - reference, exactly as stored
  double delta_K = 0.0;
  double delta_L = 0.0;
  int eps_n = 0;
  double runtime_ms = 0.0;
  std::optional<std::uint64_t> seed;  // present on Monte Carlo rows
};

inline std::vector<ConvergenceRecord> run_sweep(const SweepConfig& cfg) {
  if (cfg.n_values.empty()) throw ValidationError("n_values must be nonempty");
  for (size_t i = 1; i < cfg.n_values.size(); ++i)
    if (cfg.n_values[i] <= cfg.n_values[i - 1])
      throw ValidationError("n_values must be strictly ascending");
  if (cfg.methods.empty()) throw ValidationError("at least one method required");
  validate(cfg.market, cfg.spec);

  const double reference = price_analytic(cfg.market, cfg.spec).price;
  std::vector<ConvergenceRecord> rows;
  for (int n : cfg.n_values) {
    const LatticeGeometry g = lattice_geometry(cfg.market, cfg.spec.strike, cfg.spec.barrier, n);
    for (PricingMethod method : cfg.methods) {
      const auto t0 = std::chrono::steady_clock::now();
      const PriceResult pr = price_with_method(cfg.market, cfg.spec, method, n, cfg.rule, cfg.mc);
      const auto t1 = std::chrono::steady_clock::now();
      ConvergenceRecord rec;
      rec.n = n;
      rec.method = to_string(method);
      rec.price = pr.price;
      rec.reference = reference;
      rec.error = pr.price - reference;
      rec.delta_K = g.delta_K;
      rec.delta_L = g.delta_L;
      rec.eps_n = g.eps_n;
      rec.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      if (method == PricingMethod::monte_carlo) rec.seed = cfg.mc.seed;
      rows.push_back(std::move(rec));
    }
  }
  std::sort(rows.begin(), rows.end(), [](const ConvergenceRecord& a, const ConvergenceRecord& b) {
    return a.n != b.n ? a.n < b.n : a.method < b.method;
  });
  return rows;
}

namespace detail {

inline std::string full_precision(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline constexpr const char* kSweepCsvHeader =
    "n,method,price,reference,error,delta_K,delta_L,eps_n,runtime_ms";

inline void write_csv(const std::vector<ConvergenceRecord>& rows, std::ostream& os) {
  os << kSweepCsvHeader << "\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.method << ',' << detail::full_precision(r.price) << ','
       << detail::full_precision(r.reference) << ',' << detail::full_precision(r.error) << ','
       << detail::full_precision(r.delta_K) << ',' << detail::full_precision(r.delta_L) << ','
       << r.eps_n << ',' << detail::full_precision(r.runtime_ms) << "\n";
  }
}

inline std::vector<ConvergenceRecord> read_csv(std::istream& is) {
  std::vector<ConvergenceRecord> rows;
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("empty CSV");
  if (line != kSweepCsvHeader) throw ValidationError("unexpected CSV header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 9) throw ValidationError("malformed CSV row");
    ConvergenceRecord r;
    r.n = std::stoi(fields[0]);
    r.method = fields[1];
    r.price = std::stod(fields[2]);
    r.reference = std::stod(fields[3]);
    r.error = std::stod(fields[4]);
    r.delta_K = std::stod(fields[5]);
    r.delta_L = std::stod(fields[6]);
    r.eps_n = std::stoi(fields[7]);
    r.runtime_ms = std::stod(fields[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline nlohmann::json records_to_json(const std::vector<ConvergenceRecord>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json o{{"n", r.n},           {"method", r.method},
                     {"price", r.price},   {"reference", r.reference},
                     {"error", r.error},   {"delta_K", r.delta_K},
                     {"delta_L", r.delta_L}, {"eps_n", r.eps_n},
                     {"runtime_ms", r.runtime_ms}};
    if (r.seed) o["seed"] = *r.seed;
    arr.push_back(std::move(o));
  }
  return arr;
}

inline std::vector<ConvergenceRecord> records_from_json(const nlohmann::json& arr) {
  std::vector<ConvergenceRecord> rows;
  for (const auto& o : arr) {
    ConvergenceRecord r;
    r.n = o.at("n").get<int>();
    r.method = o.at("method").get<std::string>();
    r.price = o.at("price").get<double>();
    r.reference = o.at("reference").get<double>();
    r.error = o.at("error").get<double>();
    r.delta_K = o.at("delta_K").get<double>();
    r.delta_L = o.at("delta_L").get<double>();
    r.eps_n = o.at("eps_n").get<int>();
    r.runtime_ms = o.at("runtime_ms").get<double>();
    if (o.contains("seed")) r.seed = o.at("seed").get<std::uint64_t>();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace digibar

// Command-line front end: single-price queries, convergence sweeps, and
// error-expansion diagnostics with CSV/JSON output.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "digibar/digibar.hpp"
#include "digibar/expansion.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitArgument = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  double s0 = 150.0, rate = 0.1, vol = 0.25, maturity = 1.0;
  double strike = 100.0, barrier = 60.0;
  std::string side = "call", knock = "out", orientation = "down", style = "european";
  std::string prob = "martingale";
  int table = 0;
  std::uint64_t seed = 42;
  long long mc_paths = 1'000'000;
  int mc_steps_per_year = 365;
  bool no_bridge = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--s0", o.s0, "spot price");
  cmd->add_option("--rate", o.rate, "risk-free rate per year");
  cmd->add_option("--vol", o.vol, "volatility per sqrt-year");
  cmd->add_option("--maturity", o.maturity, "maturity in years");
  cmd->add_option("--strike", o.strike, "strike K");
  cmd->add_option("--barrier", o.barrier, "barrier level");
  cmd->add_option("--side", o.side, "call|put")->check(CLI::IsMember({"call", "put"}));
  cmd->add_option("--knock", o.knock, "in|out")->check(CLI::IsMember({"in", "out"}));
  cmd->add_option("--orientation", o.orientation, "down|up")
      ->check(CLI::IsMember({"down", "up"}));
  cmd->add_option("--style", o.style, "european|american")
      ->check(CLI::IsMember({"european", "american"}));
  cmd->add_option("--prob", o.prob, "one-step probability rule: martingale|walk")
      ->check(CLI::IsMember({"martingale", "walk"}));
  cmd->add_option("--table", o.table, "preload reference parameter set 1 or 2")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_option("--seed", o.seed, "Monte Carlo seed");
  cmd->add_option("--mc-paths", o.mc_paths, "Monte Carlo path count");
  cmd->add_option("--mc-steps-per-year", o.mc_steps_per_year, "Monte Carlo steps per year");
  cmd->add_flag("--no-bridge", o.no_bridge, "disable the Brownian-bridge crossing correction");
  cmd->add_option("--threads", o.threads, "Monte Carlo worker threads (0 = auto)");
}

digibar::MarketParams market_of(const CommonOptions& o) {
  if (o.table != 0) return digibar::table_market();
  return {o.s0, o.rate, o.vol, o.maturity};
}

digibar::DigitalOptionSpec spec_of(const CommonOptions& o) {
  if (o.table == 1) return digibar::table1_spec();
  if (o.table == 2) return digibar::table2_spec();
  digibar::DigitalOptionSpec s;
  s.side = o.side == "call" ? digibar::OptionSide::call : digibar::OptionSide::put;
  s.strike = o.strike;
  s.barrier = o.barrier;
  s.barrier_side =
      o.orientation == "down" ? digibar::BarrierSide::down : digibar::BarrierSide::up;
  s.knock = o.knock == "in" ? digibar::Knock::in : digibar::Knock::out;
  s.style = o.style == "european" ? digibar::ExerciseStyle::european
                                  : digibar::ExerciseStyle::american;
  return s;
}

digibar::ProbabilityRule rule_of(const CommonOptions& o) {
  return o.prob == "walk" ? digibar::ProbabilityRule::gaussian_walk
                          : digibar::ProbabilityRule::martingale;
}

digibar::McConfig mc_of(const CommonOptions& o) {
  digibar::McConfig mc;
  mc.paths = o.mc_paths;
  mc.steps_per_year = o.mc_steps_per_year;
  mc.seed = o.seed;
  mc.use_bridge_correction = !o.no_bridge;
  mc.num_threads = o.threads;
  return mc;
}

std::vector<int> parse_n_values(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  return out;
}

void emit_error_line(const std::string& kind, const std::string& message) {
  nlohmann::json e{{"error", kind}, {"message", message}};
  std::cerr << e.dump() << "\n";
}

std::ostream* open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return &std::cout;
  file.open(path);
  if (!file) throw digibar::ValidationError("unwritable output path: " + path);
  return &file;
}

int cmd_price(const CommonOptions& o, const std::string& method_name, int steps,
              const std::string& format, bool bil_subtract) {
  const auto method = digibar::method_from_string(method_name);
  if (!method) throw digibar::ValidationError("unknown method: " + method_name);
  const auto market = market_of(o);
  const auto spec = spec_of(o);
  digibar::PriceResult pr;
  if (*method == digibar::PricingMethod::bil && bil_subtract) {
    pr = digibar::price_adjusted_bil(market, spec, steps, rule_of(o), true);
  } else {
    pr = digibar::price_with_method(market, spec, *method, steps, rule_of(o), mc_of(o));
  }
  if (format == "json") {
    nlohmann::json out{{"price", pr.price}, {"method", digibar::to_string(pr.method)}};
    if (pr.n_steps) out["n_steps"] = *pr.n_steps;
    for (const auto& [key, value] : pr.diagnostics) out[key] = value;
    std::cout << out.dump() << "\n";
  } else {
    std::printf("%.6f\n", pr.price);
    if (pr.n_steps) std::printf("n_steps = %d\n", *pr.n_steps);
    for (const auto& [key, value] : pr.diagnostics)
      std::printf("%s = %.17g\n", key.c_str(), value);
  }
  return kExitOk;
}

int cmd_converge(const CommonOptions& o, const std::string& n_values,
                 const std::string& methods_csv, const std::string& format,
                 const std::string& out_path) {
  digibar::SweepConfig cfg;
  cfg.market = market_of(o);
  cfg.spec = spec_of(o);
  cfg.rule = rule_of(o);
  cfg.mc = mc_of(o);
  cfg.n_values = parse_n_values(n_values);
  std::stringstream ss(methods_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto m = digibar::method_from_string(tok);
    if (!m) throw digibar::ValidationError("unknown method: " + tok);
    cfg.methods.push_back(*m);
  }
  const auto rows = digibar::run_sweep(cfg);
  for (const auto& r : rows)
    if (r.seed) std::cerr << "seed=" << *r.seed << "\n";

  std::ofstream file;
  std::ostream* os = open_output(out_path, file);
  if (format == "json")
    *os << digibar::records_to_json(rows).dump(2) << "\n";
  else
    digibar::write_csv(rows, *os);
  return kExitOk;
}

int cmd_expansion(const CommonOptions& o, const std::string& n_values,
                  const std::string& out_path) {
  const auto market = market_of(o);
  const auto spec = spec_of(o);
  const auto report =
      digibar::residual_order_report(market, spec, parse_n_values(n_values), rule_of(o));
  std::ofstream file;
  std::ostream* os = open_output(out_path, file);
  *os << "n,observed,predicted,residual,residual_times_n32\n";
  char buf[200];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.n, r.observed, r.predicted,
                  r.residual, r.residual_times_n32);
    *os << buf;
  }
  if (report.growth_flag) std::cerr << "warning: residual*n^1.5 grows monotonically\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"digital barrier option pricing: CRR lattice, combinatorial closed forms, "
               "adjusted binomial interpolated lattice, analytic and simulation oracles"};
  app.require_subcommand(1);

  CommonOptions price_opts, conv_opts, exp_opts;
  std::string method = "analytic";
  int steps = 100;
  std::string price_format = "text";
  bool bil_subtract = false;

  CLI::App* price = app.add_subcommand("price", "price a single option");
  add_common(price, price_opts);
  price->add_option("--method", method,
                    "analytic|crr|crr_combinatorial|bil|enumeration|mc");
  price->add_option("--steps", steps, "lattice step count n");
  price->add_option("--format", price_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  price->add_flag("--bil-subtract-constant", bil_subtract,
                  "subtract the 1/sqrt(n') expansion constant inside adjusted BIL");

  std::string n_values = "100,200,400,800,1600,3200";
  std::string methods_csv = "crr,bil,analytic";
  std::string conv_format = "csv";
  std::string out_path;

  CLI::App* conv = app.add_subcommand("converge", "run a convergence sweep");
  add_common(conv, conv_opts);
  conv->add_option("--n-values", n_values, "comma-separated ascending step counts");
  conv->add_option("--methods", methods_csv, "comma-separated methods");
  conv->add_option("--format", conv_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  conv->add_option("--out", out_path, "output path (default stdout)");

  std::string exp_n_values = "100,200,400,800,1600,3200";
  std::string exp_out;
  CLI::App* expn = app.add_subcommand("expansion", "error-expansion residual report");
  add_common(expn, exp_opts);
  expn->add_option("--n-values", exp_n_values, "comma-separated ascending step counts");
  expn->add_option("--out", exp_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    emit_error_line("argument", e.what());
    return kExitArgument;
  }

  try {
    if (price->parsed()) return cmd_price(price_opts, method, steps, price_format, bil_subtract);
    if (conv->parsed())
      return cmd_converge(conv_opts, n_values, methods_csv, conv_format, out_path);
    if (expn->parsed()) return cmd_expansion(exp_opts, exp_n_values, exp_out);
  } catch (const digibar::ValidationError& e) {
    emit_error_line("validation", e.what());
    return kExitArgument;
  } catch (const std::domain_error& e) {
    emit_error_line("regime", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    emit_error_line("internal", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}

#include "mvp/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvp/frontier.hpp"
#include "mvp/io.hpp"
#include "mvp/market_io.hpp"
#include "mvp/region.hpp"
#include "mvp/simulate.hpp"
#include "mvp/verify.hpp"

namespace mvp::cli {

using nlohmann::json;

namespace {

// Reference values of the one-stock worked example (r = 6%, mu = 12%,
// sigma = 15%, T = 1 year).
constexpr double kExampleRate = 0.06;
constexpr double kExampleMu = 0.12;
constexpr double kExampleSigma = 0.15;
constexpr double kExampleHorizon = 1.0;
constexpr double kRefSlope = 0.4165;
constexpr double kRefRiskFree = 0.0618;
constexpr double kRefStockMean = 0.1275;
constexpr double kRefStockStd = 0.1701;
constexpr double kRefStockSharpe = 0.3862;
constexpr double kRefPremium = 0.0785;

struct Common {
  std::string market_file;
  double x0 = 1.0;
  std::vector<double> targets;
  std::size_t paths = 10000;
  std::size_t steps = 250;
  std::optional<std::uint64_t> seed;
  std::string scheme = "euler";
  unsigned workers = 1;
  std::string out_dir = ".";
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MVP_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used, 10);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(Errc::BadParams, std::string("MVP_SEED is not an unsigned integer: ") + env);
  }
  return 1;
}

SimConfig sim_config(const Common& c) {
  SimConfig cfg;
  cfg.n_paths = c.paths;
  cfg.n_steps = c.steps;
  cfg.seed = resolve_seed(c.seed);
  cfg.scheme = parse_scheme(c.scheme);
  cfg.workers = c.workers;
  return cfg;
}

json echo(const std::string& command, const Common& c, std::uint64_t seed) {
  return {{"command", command},  {"market", c.market_file}, {"x0", c.x0},
          {"z", c.targets},      {"paths", c.paths},        {"steps", c.steps},
          {"seed", seed},        {"scheme", c.scheme},      {"out", c.out_dir}};
}

Vector parse_weights(const std::vector<double>& w) {
  return Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
}

std::string json_text(const json& doc) { return doc.dump(2) + "\n"; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ---------------------------------------------------------------- commands

int cmd_frontier(const Common& c, double z_min_flag, double z_max_flag, int count,
                 std::ostream& out) {
  const ValidatedMarket market = validate_market(load_market(c.market_file));
  const double payoff = risk_free_payoff(market, c.x0);
  std::vector<DiagramPoint> points;
  if (!c.targets.empty()) {
    for (double z : c.targets) {
      auto p = frontier_points(market, c.x0, z, z, 1);
      points.push_back(std::move(p.front()));
    }
    std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
      return a.std_return < b.std_return;
    });
  } else {
    const double z_min = std::isnan(z_min_flag) ? payoff : z_min_flag;
    const double z_max = std::isnan(z_max_flag) ? payoff + 0.5 * c.x0 : z_max_flag;
    points = frontier_points(market, c.x0, z_min, z_max, z_min == z_max ? 1 : count);
  }
  const double slope = frontier_slope(market);
  const double rf = market.risk_free_return();

  json summary = {{"slope", slope},
                  {"risk_free_return", rf},
                  {"risk_free_payoff", payoff},
                  {"points", points.size()},
                  {"config", echo("frontier", c, 0)}};
  summary["config"].erase("seed");
  summary["config"]["z_min"] = std::isnan(z_min_flag) ? json(nullptr) : json(z_min_flag);
  summary["config"]["z_max"] = std::isnan(z_max_flag) ? json(nullptr) : json(z_max_flag);
  summary["config"]["count"] = count;

  OutputSet files(c.out_dir);
  files.add("frontier.csv", diagram_csv(points, rf));
  files.add("frontier.json", json_text(summary));
  files.commit();
  out << "frontier slope " << format_short(slope) << ", R_f(T) " << format_short(rf) << ", "
      << points.size() << " points -> " << c.out_dir << "\n";
  return kOk;
}

int cmd_simulate(const Common& c, const std::vector<double>& weights, bool samples,
                 std::ostream& out) {
  const ValidatedMarket market = validate_market(load_market(c.market_file));
  const SimConfig cfg = sim_config(c);

  std::optional<Strategy> strategy;
  if (!weights.empty()) {
    if (!c.targets.empty()) throw Error(Errc::BadParams, "give either --z or --weights, not both");
    strategy = Strategy::constant_mix(parse_weights(weights));
  } else {
    if (c.targets.size() != 1) throw Error(Errc::BadParams, "simulate needs exactly one --z or --weights");
    strategy = Strategy::efficient(c.targets.front());
  }
  const PathEnsemble ens = simulate_wealth(market, c.x0, *strategy, cfg);
  const TerminalStats st = estimate_terminal_stats(ens, c.x0);

  json summary = {{"strategy", strategy->label()},
                  {"scheme", to_string(ens.scheme)},
                  {"seed", ens.seed},
                  {"paths", ens.terminal_wealth.size()},
                  {"steps", ens.n_steps},
                  {"risk_free_return", ens.risk_free_return},
                  {"mean_return", st.mean_return},
                  {"std_return", st.std_return},
                  {"sharpe", optional_json(st.sharpe)},
                  {"se_mean", st.se_mean},
                  {"se_std", st.se_std},
                  {"config", echo("simulate", c, cfg.seed)}};
  summary["config"]["weights"] = weights;
  summary["config"]["samples"] = samples;
  if (const auto* eff = std::get_if<EfficientStrategy>(&strategy->kind)) {
    const EfficientSolution sol = efficient_solution(market, c.x0, eff->target);
    summary["cap_violations"] = ens.cap_violations;
    summary["cap_checks"] = ens.cap_checks;
    summary["closed_form"] = {{"gamma", sol.gamma},
                              {"variance", sol.variance},
                              {"mean_return", sol.mean_return},
                              {"std_return", sol.std_return},
                              {"slope", sol.slope}};
  }

  OutputSet files(c.out_dir);
  files.add("simulate.json", json_text(summary));
  if (samples) {
    std::string csv = "terminal_wealth\n";
    for (double x : ens.terminal_wealth) csv += format_full(x) + "\n";
    files.add("terminal.csv", std::move(csv));
  }
  files.commit();
  out << strategy->label() << ": mean return " << format_short(st.mean_return) << " (se "
      << format_short(st.se_mean) << "), std " << format_short(st.std_return) << ", sharpe "
      << (st.sharpe ? format_short(*st.sharpe) : std::string("undefined")) << "\n";
  return kOk;
}

struct RegionFlags {
  std::string kind = "risky";
  std::size_t strategies = 200;
  std::vector<double> weights;
  double alpha_min = 0.0;
  double alpha_max = 2.0;
  int alpha_count = 9;
  double k = 3.0;
};

int cmd_region(const Common& c, const RegionFlags& f, std::ostream& out) {
  const ValidatedMarket market = validate_market(load_market(c.market_file));
  SimConfig cfg = sim_config(c);
  if (cfg.scheme != Scheme::Euler) {
    throw Error(Errc::SchemeMismatch, "region sampling uses the euler scheme");
  }
  RegionSample sample;
  if (f.kind == "risky") {
    sample = sample_risky_region(market, c.x0, f.strategies, cfg);
  } else if (f.kind == "combination") {
    Vector w = f.weights.empty() ? Vector::Unit(static_cast<Eigen::Index>(market.assets()), 0)
                                 : parse_weights(f.weights);
    const Strategy risky = Strategy::constant_mix(std::move(w));
    std::vector<AlphaSpec> specs = constant_alpha_grid(f.alpha_min, f.alpha_max, f.alpha_count);
    const double payoff = risk_free_payoff(market, c.x0);
    for (double scale : {1.05, 1.1, 1.2}) {
      specs.emplace_back(AlphaThreshold{payoff * scale, 1.0, 0.5});
    }
    specs.emplace_back(AlphaRandomSwitch{4.0, {0.5, 1.0, 1.5}});
    sample = sample_combination_region(market, c.x0, risky, specs, cfg);
  } else {
    throw Error(Errc::BadParams, "unknown region kind '" + f.kind + "'");
  }
  const SeparationReport rep = check_separation(sample, f.k);

  json sidecar = {{"risk_free_return", sample.risk_free_return},
                  {"slope", sample.slope},
                  {"sampler", sample.sampler},
                  {"points", sample.points.size()},
                  {"separation",
                   {{"k", rep.confidence_k},
                    {"evaluated", rep.evaluated},
                    {"excluded", rep.excluded},
                    {"flags", rep.flags},
                    {"max_sharpe", optional_json(rep.max_sharpe)},
                    {"gap", optional_json(rep.gap)},
                    {"flagged", rep.flagged}}},
                  {"config", echo("region", c, cfg.seed)}};
  sidecar["config"]["kind"] = f.kind;
  sidecar["config"]["strategies"] = f.strategies;
  sidecar["config"]["weights"] = f.weights;
  sidecar["config"]["k"] = f.k;

  OutputSet files(c.out_dir);
  files.add("region.csv", diagram_csv(sample.points, sample.risk_free_return));
  files.add("region.json", json_text(sidecar));
  files.commit();
  out << sample.points.size() << " points, frontier slope " << format_short(sample.slope)
      << ", max sharpe " << (rep.max_sharpe ? format_short(*rep.max_sharpe) : "undefined")
      << ", flags " << rep.flags << "\n";
  return kOk;
}

struct VerifyFlags {
  std::size_t euler_paths = 10000;
  std::size_t region_strategies = 200;
  std::size_t region_paths = 100000;
  std::size_t region_steps = 20;
  std::size_t check_times = 32;
};

int cmd_verify(const Common& c, const VerifyFlags& f, std::ostream& out) {
  const MarketModel model = load_market(c.market_file);
  VerifyConfig cfg;
  cfg.sim = sim_config(c);
  cfg.sim.scheme = Scheme::Exact;
  cfg.euler_paths = f.euler_paths;
  cfg.region_strategies = f.region_strategies;
  cfg.region_paths = f.region_paths;
  cfg.region_steps = f.region_steps;
  cfg.check_times = f.check_times;

  std::vector<double> targets = c.targets;
  if (targets.empty()) {
    const ValidatedMarket market = validate_market(model);
    const double payoff = risk_free_payoff(market, c.x0);
    targets = {payoff, std::max(1.2 * c.x0, 1.1 * payoff)};
  }
  VerificationReport report = run_all(model, c.x0, targets, cfg);
  if (report.checks.size() == 1 && report.checks.front().name == "market_validation") {
    throw Error(Errc::BadParams, report.checks.front().detail);
  }
  report.config["market"] = c.market_file;

  OutputSet files(c.out_dir);
  files.add("report.json", dump_report(report));
  files.commit();
  for (const auto& rec : report.checks) {
    out << (rec.pass ? "PASS " : "FAIL ") << rec.name << " statistic "
        << format_short(rec.statistic) << " " << rec.comparison << " "
        << format_short(rec.threshold) << (rec.skipped ? " (skipped)" : "") << "\n";
  }
  out << (report.pass ? "overall PASS" : "overall FAIL") << "\n";
  return report.pass ? kOk : kVerificationFailed;
}

int cmd_example(double tolerance, double premium_tolerance, const std::string& out_dir,
                std::ostream& out) {
  const ValidatedMarket market =
      validate_market(black_scholes_market(kExampleRate, kExampleMu, kExampleSigma, kExampleHorizon));
  const double slope = frontier_slope(market);
  const double rf = market.risk_free_return();
  const StockStats stock = stock_stats_bs(kExampleMu, kExampleSigma, kExampleRate, kExampleHorizon);
  const double prem = premium(slope, stock.sharpe);

  struct Item {
    const char* name;
    double value, reference, tol;
  };
  const Item items[] = {{"slope", slope, kRefSlope, tolerance},
                        {"risk_free_return", rf, kRefRiskFree, tolerance},
                        {"stock_mean", stock.mean_return, kRefStockMean, tolerance},
                        {"stock_std", stock.std_return, kRefStockStd, tolerance},
                        {"stock_sharpe", stock.sharpe, kRefStockSharpe, tolerance},
                        {"premium", prem, kRefPremium, premium_tolerance}};
  json doc = json::object();
  json checks = json::object();
  bool pass = true;
  for (const auto& it : items) {
    const bool ok = std::abs(it.value - it.reference) <= it.tol;
    pass = pass && ok;
    doc[it.name] = it.value;
    checks[it.name] = {{"reference", it.reference}, {"tolerance", it.tol}, {"pass", ok}};
  }
  doc["market"] = {{"rate", kExampleRate},
                   {"mu", kExampleMu},
                   {"sigma", kExampleSigma},
                   {"horizon", kExampleHorizon}};
  doc["checks"] = std::move(checks);
  doc["pass"] = pass;
  doc["config"] = {{"command", "example"},
                   {"tolerance", tolerance},
                   {"premium_tolerance", premium_tolerance},
                   {"out", out_dir}};
  if (!out_dir.empty()) {
    OutputSet files(out_dir);
    files.add("example.json", json_text(doc));
    files.commit();
  }
  out << json_text(doc);
  if (!pass) throw Error(Errc::SelfCheckFailed, "example values outside tolerance");
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool market, bool sim, bool scheme = true) {
  if (market) sub->add_option("--market", c.market_file, "Market definition (JSON)")->required();
  sub->add_option("--x0", c.x0, "Initial wealth")->capture_default_str();
  sub->add_option("--z", c.targets, "Target expected terminal wealth (repeatable)");
  if (sim) {
    sub->add_option("--paths", c.paths, "Monte Carlo paths")->capture_default_str();
    sub->add_option("--steps", c.steps, "Time steps on [0, T]")->capture_default_str();
    sub->add_option("--seed", c.seed, "Seed (falls back to MVP_SEED)");
    if (scheme) sub->add_option("--scheme", c.scheme, "euler or exact")->capture_default_str();
    sub->add_option("--workers", c.workers, "Worker threads")->capture_default_str();
  }
  sub->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continuous-time mean-variance frontier, simulation and verification"};
  app.require_subcommand(1);

  Common frontier_opts, simulate_opts, region_opts, verify_opts;
  region_opts.paths = 100000;
  region_opts.steps = 20;
  verify_opts.paths = 100000;
  verify_opts.scheme = "exact";

  auto* frontier = app.add_subcommand("frontier", "Frontier points and slope");
  add_common(frontier, frontier_opts, true, false);
  double z_min = std::nan(""), z_max = std::nan("");
  int count = 21;
  frontier->add_option("--z-min", z_min, "Smallest target (default: risk-free payoff)");
  frontier->add_option("--z-max", z_max, "Largest target");
  frontier->add_option("--count", count, "Number of targets")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo wealth simulation");
  add_common(simulate, simulate_opts, true, true);
  std::vector<double> weights;
  bool samples = false;
  simulate->add_option("--weights", weights, "Constant pure-risky mix (sums to 1)")->delimiter(',');
  simulate->add_flag("--samples", samples, "Also write terminal.csv");

  auto* region = app.add_subcommand("region", "Sample risky or combination regions");
  add_common(region, region_opts, true, true);
  RegionFlags rflags;
  region->add_option("--kind", rflags.kind, "risky or combination")->capture_default_str();
  region->add_option("--strategies", rflags.strategies, "Pure-risky strategies")->capture_default_str();
  region->add_option("--weights", rflags.weights, "Risky mix for combinations")->delimiter(',');
  region->add_option("--alpha-min", rflags.alpha_min, "Constant alpha grid start")->capture_default_str();
  region->add_option("--alpha-max", rflags.alpha_max, "Constant alpha grid end")->capture_default_str();
  region->add_option("--alpha-count", rflags.alpha_count, "Constant alpha grid size")->capture_default_str();
  region->add_option("--k", rflags.k, "Standard errors for separation flags")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run the verification checks");
  add_common(verify, verify_opts, true, true, false);
  VerifyFlags vflags;
  verify->add_option("--euler-paths", vflags.euler_paths, "Paths per Euler step count")
      ->capture_default_str();
  verify->add_option("--region-strategies", vflags.region_strategies, "Pure-risky strategies")
      ->capture_default_str();
  verify->add_option("--region-paths", vflags.region_paths, "Paths per sampled strategy")
      ->capture_default_str();
  verify->add_option("--region-steps", vflags.region_steps, "Steps per sampled strategy")
      ->capture_default_str();
  verify->add_option("--check-times", vflags.check_times, "Equispaced check times in (0, T]")
      ->capture_default_str();

  auto* example = app.add_subcommand("example", "Reproduce the one-stock worked example");
  double tolerance = 5e-4, premium_tolerance = 1e-3;
  std::string example_out;
  example->add_option("--tolerance", tolerance, "Tolerance on slope and stock statistics")
      ->capture_default_str();
  example->add_option("--premium-tolerance", premium_tolerance)->capture_default_str();
  example->add_option("--out", example_out, "Also write example.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*frontier) return cmd_frontier(frontier_opts, z_min, z_max, count, out);
    if (*simulate) return cmd_simulate(simulate_opts, weights, samples, out);
    if (*region) return cmd_region(region_opts, rflags, out);
    if (*verify) return cmd_verify(verify_opts, vflags, out);
    if (*example) return cmd_example(tolerance, premium_tolerance, example_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == Errc::NumericalBlowup) return kBlowup;
    if (e.code() == Errc::SelfCheckFailed) return kVerificationFailed;
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace mvp::cli

#include "mvp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "mvp/frontier.hpp"
#include "mvp/io.hpp"
#include "mvp/region.hpp"
#include "mvp/rng.hpp"

namespace mvp {

using nlohmann::json;

// ---------------------------------------------------------------- report io

json to_json(const VerificationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"statistic", c.statistic},
                      {"threshold", c.threshold},
                      {"comparison", c.comparison},
                      {"pass", c.pass},
                      {"skipped", c.skipped},
                      {"detail", c.detail},
                      {"config", c.config},
                      {"seed", c.seed}});
  }
  return {{"checks", std::move(checks)},
          {"pass", report.pass},
          {"seed", report.seed},
          {"config", report.config}};
}

VerificationReport report_from_json(const json& doc) {
  VerificationReport r;
  try {
    for (const auto& c : doc.at("checks")) {
      CheckRecord rec;
      rec.name = c.at("name").get<std::string>();
      rec.statistic = c.at("statistic").get<double>();
      rec.threshold = c.at("threshold").get<double>();
      rec.comparison = c.value("comparison", std::string());
      rec.pass = c.at("pass").get<bool>();
      rec.skipped = c.value("skipped", false);
      rec.detail = c.value("detail", std::string());
      rec.config = c.value("config", json::object());
      rec.seed = c.value("seed", std::uint64_t{0});
      r.checks.push_back(std::move(rec));
    }
    r.pass = doc.at("pass").get<bool>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.config = doc.value("config", json::object());
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  return r;
}

std::string dump_report(const VerificationReport& report) { return to_json(report).dump(2) + "\n"; }

// ---------------------------------------------------------------- helpers

namespace {

json sim_echo(const SimConfig& sim, double x0, double z) {
  return {{"x0", x0},          {"z", z},
          {"paths", sim.n_paths}, {"steps", sim.n_steps},
          {"seed", sim.seed},   {"stream", sim.stream},
          {"scheme", to_string(sim.scheme)}};
}

std::string z_tag(double z) { return "[z=" + format_full(z) + "]"; }

std::vector<double> merge_grid(const std::vector<double>& a, const std::vector<double>& b,
                               double horizon) {
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  const double eps = 1e-12 * horizon;
  for (double t : all) {
    if (out.empty() || t - out.back() > eps) out.push_back(t);
  }
  out.front() = 0.0;
  out.back() = horizon;
  return out;
}

std::size_t index_of(const std::vector<double>& grid, double t, double horizon) {
  auto it = std::lower_bound(grid.begin(), grid.end(), t - 1e-12 * horizon);
  return static_cast<std::size_t>(it - grid.begin());
}

// Uniform simulation grid refined by the check times.
struct ExactRun {
  std::vector<double> grid;
  std::vector<double> times;
  std::vector<std::size_t> at;  // grid index of each check time
};

ExactRun exact_run_layout(const ValidatedMarket& market, const VerifyConfig& cfg,
                          bool include_zero) {
  ExactRun run;
  run.times = check_times(market, cfg.check_times, include_zero);
  run.grid = merge_grid(uniform_grid(market.horizon(), cfg.sim.n_steps), run.times,
                        market.horizon());
  for (double t : run.times) run.at.push_back(index_of(run.grid, t, market.horizon()));
  return run;
}

SimConfig exact_config(const VerifyConfig& cfg) {
  SimConfig sim = cfg.sim;
  sim.scheme = Scheme::Exact;
  return sim;
}

}  // namespace

std::vector<double> check_times(const ValidatedMarket& market, std::size_t count,
                                bool include_zero) {
  const double T = market.horizon();
  std::vector<double> times;
  if (include_zero) times.push_back(0.0);
  for (std::size_t i = 1; i <= count; ++i) {
    times.push_back(T * static_cast<double>(i) / static_cast<double>(count));
  }
  for (double b : market.breakpoints()) {
    if (b > 0.0) times.push_back(b);
  }
  std::sort(times.begin(), times.end());
  std::vector<double> out;
  for (double t : times) {
    if (out.empty() || t - out.back() > 1e-12 * T) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------- checks

std::vector<CheckRecord> verify_wealth_cap(const ValidatedMarket& market, double x0, double z,
                                           const VerifyConfig& cfg) {
  const bool risk_free = is_risk_free_target(market, x0, z);
  const double g = gamma(market, x0, z);
  const double tol = kCapTolerance * g;
  const SimConfig sim = exact_config(cfg);
  const std::vector<double> grid = uniform_grid(market.horizon(), sim.n_steps);
  std::vector<double> caps;
  for (double t : grid) caps.push_back(wealth_cap(market, g, t));

  const unsigned workers = std::max(1u, sim.workers);
  std::vector<std::uint64_t> off_boundary(workers, 0);
  const PathEnsemble ens = exact_efficient_paths(
      market, x0, z, sim, grid, [&](unsigned w, std::uint32_t, std::span<const double> wealth) {
        for (std::size_t k = 0; k < wealth.size(); ++k) {
          // Risk-free target: wealth must sit on the cap. Otherwise it must
          // stay strictly below it.
          const bool bad = risk_free ? std::abs(wealth[k] - caps[k]) > tol : !(wealth[k] < caps[k]);
          if (bad) ++off_boundary[w];
        }
      });
  std::uint64_t boundary_failures = 0;
  for (auto v : off_boundary) boundary_failures += v;

  std::vector<CheckRecord> out;
  CheckRecord exact;
  exact.name = "wealth_cap_exact" + z_tag(z);
  exact.statistic = static_cast<double>(ens.cap_violations);
  exact.threshold = 0.0;
  exact.comparison = "==";
  exact.pass = ens.cap_violations == 0;
  exact.detail = std::to_string(ens.cap_violations) + " of " + std::to_string(ens.cap_checks) +
                 " (path, time) pairs above gamma e^{-int_t^T r} + " + format_full(kCapTolerance) +
                 " gamma; gamma = " + format_full(g);
  exact.config = sim_echo(sim, x0, z);
  exact.seed = sim.seed;
  out.push_back(exact);

  CheckRecord boundary = exact;
  boundary.name = (risk_free ? "wealth_cap_equality" : "wealth_cap_strict") + z_tag(z);
  boundary.statistic = static_cast<double>(boundary_failures);
  boundary.pass = boundary_failures == 0;
  boundary.detail = risk_free ? "pairs with |x - cap| > tolerance at the risk-free target"
                              : "pairs with x >= cap for a target above the risk-free payoff";
  out.push_back(boundary);

  CheckRecord euler;
  euler.name = "wealth_cap_euler_monotone" + z_tag(z);
  euler.comparison = "<=";
  euler.threshold = 0.0;
  std::vector<double> fractions;
  std::ostringstream detail;
  detail << "violation fraction by n_steps:";
  for (std::size_t steps : cfg.euler_steps) {
    SimConfig es = cfg.sim;
    es.scheme = Scheme::Euler;
    es.n_steps = steps;
    es.n_paths = cfg.euler_paths;
    const PathEnsemble e = simulate_wealth(market, x0, Strategy::efficient(z), es);
    const double f = static_cast<double>(e.cap_violations) / static_cast<double>(e.cap_checks);
    fractions.push_back(f);
    detail << ' ' << steps << '=' << format_full(f);
  }
  // Largest increase between consecutive refinements; must not be positive.
  double worst = 0.0;
  for (std::size_t i = 1; i < fractions.size(); ++i) {
    worst = std::max(worst, fractions[i] - fractions[i - 1]);
  }
  euler.statistic = worst;
  euler.pass = worst <= 0.0;
  euler.detail = detail.str();
  euler.config = sim_echo(cfg.sim, x0, z);
  euler.config["scheme"] = "euler";
  euler.config["paths"] = cfg.euler_paths;
  euler.config["steps"] = cfg.euler_steps;
  euler.seed = cfg.sim.seed;
  out.push_back(euler);
  return out;
}

CheckRecord verify_risky_exposure(const ValidatedMarket& market, double x0, double z,
                                  const VerifyConfig& cfg) {
  CheckRecord rec;
  rec.name = "risky_exposure" + z_tag(z);
  rec.threshold = 1.0;
  rec.comparison = "==";
  const SimConfig sim = exact_config(cfg);
  rec.config = sim_echo(sim, x0, z);
  rec.seed = sim.seed;
  if (is_risk_free_target(market, x0, z)) {
    rec.statistic = 1.0;
    rec.pass = true;
    rec.skipped = true;
    rec.detail = "target equals the risk-free payoff; exposure is only claimed above it";
    return rec;
  }
  const double g = gamma(market, x0, z);
  const ExactRun run = exact_run_layout(market, cfg, true);

  // Times where B(t) = 0 carry no claim.
  std::vector<std::size_t> active;
  std::vector<const Vector*> merton;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const auto& iv = market.at(run.times[i]);
    merton.push_back(&iv.merton);
    if (iv.excess.cwiseAbs().maxCoeff() > 0.0) active.push_back(i);
  }
  std::vector<double> caps;
  for (double t : run.times) caps.push_back(wealth_cap(market, g, t));

  const unsigned workers = std::max(1u, sim.workers);
  std::vector<std::vector<std::uint64_t>> exposed(workers,
                                                  std::vector<std::uint64_t>(run.times.size(), 0));
  exact_efficient_paths(market, x0, z, sim, run.grid,
                        [&](unsigned w, std::uint32_t, std::span<const double> wealth) {
                          for (std::size_t i : active) {
                            const double gap = wealth[run.at[i]] - caps[i];
                            const Vector pi = -gap * *merton[i];
                            if (pi.cwiseAbs().maxCoeff() > 0.0) ++exposed[w][i];
                          }
                        });
  double min_fraction = 1.0;
  for (std::size_t i : active) {
    std::uint64_t total = 0;
    for (const auto& per : exposed) total += per[i];
    min_fraction = std::min(min_fraction, static_cast<double>(total) / static_cast<double>(sim.n_paths));
  }
  rec.statistic = min_fraction;
  rec.pass = active.empty() ? true : min_fraction == 1.0;
  rec.detail = "minimum over " + std::to_string(active.size()) + " of " +
               std::to_string(run.times.size()) +
               " check times with B(t) != 0 of the fraction of paths with pi*(t) != 0";
  return rec;
}

CheckRecord verify_bond_allocation(const ValidatedMarket& market, double x0, double z,
                                   const VerifyConfig& cfg) {
  CheckRecord rec;
  rec.name = "bond_allocation" + z_tag(z);
  rec.threshold = 0.0;
  rec.comparison = ">";
  const SimConfig sim = exact_config(cfg);
  rec.config = sim_echo(sim, x0, z);
  rec.seed = sim.seed;

  const bool risk_free = is_risk_free_target(market, x0, z);
  const double g = gamma(market, x0, z);
  const ExactRun run = exact_run_layout(market, cfg, false);
  std::vector<double> caps;
  std::vector<const Vector*> merton;
  for (double t : run.times) {
    caps.push_back(wealth_cap(market, g, t));
    merton.push_back(&market.at(t).merton);
  }
  const double eps = 1e-9 * x0;
  const unsigned workers = std::max(1u, sim.workers);
  std::vector<std::vector<std::uint64_t>> holding(workers,
                                                  std::vector<std::uint64_t>(run.times.size(), 0));
  exact_efficient_paths(market, x0, z, sim, run.grid,
                        [&](unsigned w, std::uint32_t, std::span<const double> wealth) {
                          for (std::size_t i = 0; i < run.times.size(); ++i) {
                            const double x = wealth[run.at[i]];
                            const double risky = risk_free ? 0.0 : -(x - caps[i]) * merton[i]->sum();
                            if (std::abs(x - risky) > eps) ++holding[w][i];
                          }
                        });
  double min_fraction = 1.0;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    std::uint64_t total = 0;
    for (const auto& per : holding) total += per[i];
    min_fraction = std::min(min_fraction, static_cast<double>(total) / static_cast<double>(sim.n_paths));
  }
  rec.statistic = min_fraction;
  rec.pass = min_fraction > 0.0;
  rec.detail = "minimum over " + std::to_string(run.times.size()) +
               " check times in (0, T] of the fraction of paths with |pi0*(t)| > 1e-9 x0";
  if (market.excess_discontinuous()) {
    rec.detail += "; B(t) is piecewise constant with jumps, the continuity assumption is relaxed";
  }
  return rec;
}

CheckRecord verify_sharpe_separation(const ValidatedMarket& market, double x0,
                                     const VerifyConfig& cfg) {
  SimConfig sim = cfg.sim;
  sim.scheme = Scheme::Euler;
  sim.n_paths = cfg.region_paths;
  sim.n_steps = cfg.region_steps;
  const RegionSample sample = sample_risky_region(market, x0, cfg.region_strategies, sim);
  const SeparationReport rep = check_separation(sample, cfg.confidence_k);

  CheckRecord rec;
  rec.name = "sharpe_separation";
  rec.statistic = static_cast<double>(rep.flags);
  rec.threshold = 0.0;
  rec.comparison = "==";
  rec.pass = rep.flags == 0;
  std::ostringstream detail;
  detail << rep.evaluated << " strategies, frontier slope " << format_full(rep.slope);
  if (rep.max_sharpe) {
    detail << ", max risky Sharpe " << format_full(*rep.max_sharpe) << ", gap "
           << format_full(*rep.gap);
  }
  detail << ", k = " << format_full(cfg.confidence_k);
  for (const auto& f : rep.flagged) detail << "; flagged " << f;
  rec.detail = detail.str();
  rec.config = {{"x0", x0},
                {"strategies", cfg.region_strategies},
                {"paths", sim.n_paths},
                {"steps", sim.n_steps},
                {"seed", sim.seed},
                {"stream", sim.stream},
                {"k", cfg.confidence_k}};
  rec.seed = sim.seed;
  return rec;
}

CheckRecord verify_lemma_and_bs(const LemmaGrid& grid) {
  if (grid.n_b < 1 || grid.n_x < 2 || !(grid.x_lo > 0.0) || !(grid.x_hi > grid.x_lo) ||
      !(grid.b_lo > 0.0) || !(grid.b_hi >= grid.b_lo)) {
    throw Error(Errc::BadParams, "invalid lemma grid");
  }
  std::size_t negative = 0, equality_misses = 0, strict_misses = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  const double e_lo = std::log10(grid.x_lo), e_hi = std::log10(grid.x_hi);
  for (std::size_t i = 0; i < grid.n_b; ++i) {
    const double b = grid.n_b == 1 ? grid.b_lo
                                   : grid.b_lo + (grid.b_hi - grid.b_lo) * static_cast<double>(i) /
                                                     static_cast<double>(grid.n_b - 1);
    for (std::size_t j = 0; j < grid.n_x; ++j) {
      const double e = e_lo + (e_hi - e_lo) * static_cast<double>(j) / static_cast<double>(grid.n_x - 1);
      const double x = std::abs(e) < 1e-12 ? 1.0 : std::pow(10.0, e);
      const double margin = lemma_margin(b, x);
      min_margin = std::min(min_margin, margin);
      if (margin < -1e-12) ++negative;
      if (x == 1.0) {
        if (std::abs(margin) >= 1e-10) ++equality_misses;
      } else if (!(margin > 0.0)) {
        ++strict_misses;
      }
    }
  }

  const CounterRng rng(grid.seed, 0);
  std::size_t dominance_failures = 0;
  double min_dominance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.n_draws; ++i) {
    const auto u = rng.uniform_pair(static_cast<std::uint32_t>(i), 0, kSetupLane);
    const auto v = rng.uniform_pair(static_cast<std::uint32_t>(i), 0, kSetupLane + 1);
    const double r = grid.r_max * u[0];
    const double mu = r + grid.excess_max * u[1];
    const double sigma = grid.sigma_max * v[0];
    const double T = grid.horizon_max * v[1];
    const Dominance d = bs_strict_dominance(mu, sigma, r, T);
    min_dominance = std::min(min_dominance, d.margin);
    if (!d.holds) ++dominance_failures;
  }

  CheckRecord rec;
  rec.name = "lemma_and_bs_dominance";
  rec.statistic = static_cast<double>(negative + equality_misses + strict_misses + dominance_failures);
  rec.threshold = 0.0;
  rec.comparison = "==";
  rec.pass = rec.statistic == 0.0;
  rec.detail = "lemma grid " + std::to_string(grid.n_b) + "x" + std::to_string(grid.n_x) +
               ": min margin " + format_full(min_margin) + ", below -1e-12: " +
               std::to_string(negative) + ", x=1 with |margin| >= 1e-10: " +
               std::to_string(equality_misses) + ", x!=1 with margin <= 0: " +
               std::to_string(strict_misses) + "; dominance draws " +
               std::to_string(grid.n_draws) + ": failures " + std::to_string(dominance_failures) +
               ", min margin " + format_full(min_dominance);
  rec.config = {{"n_b", grid.n_b},     {"b_lo", grid.b_lo}, {"b_hi", grid.b_hi},
                {"n_x", grid.n_x},     {"x_lo", grid.x_lo}, {"x_hi", grid.x_hi},
                {"n_draws", grid.n_draws}};
  rec.seed = grid.seed;
  return rec;
}

VerificationReport run_all(const MarketModel& model, double x0, const std::vector<double>& targets,
                           const VerifyConfig& cfg) {
  VerificationReport report;
  report.seed = cfg.sim.seed;
  report.config = {{"x0", x0},
                   {"targets", targets},
                   {"paths", cfg.sim.n_paths},
                   {"steps", cfg.sim.n_steps},
                   {"seed", cfg.sim.seed},
                   {"check_times", cfg.check_times},
                   {"euler_steps", cfg.euler_steps},
                   {"euler_paths", cfg.euler_paths},
                   {"region_strategies", cfg.region_strategies},
                   {"region_paths", cfg.region_paths},
                   {"region_steps", cfg.region_steps},
                   {"confidence_k", cfg.confidence_k}};

  auto failure = [&](const std::string& name, const std::exception& e) {
    CheckRecord rec;
    rec.name = name;
    rec.statistic = 1.0;
    rec.threshold = 0.0;
    rec.comparison = "==";
    rec.pass = false;
    rec.detail = e.what();
    rec.seed = cfg.sim.seed;
    return rec;
  };

  std::optional<ValidatedMarket> market;
  try {
    market.emplace(validate_market(model));
  } catch (const std::exception& e) {
    report.checks.push_back(failure("market_validation", e));
    report.pass = false;
    return report;
  }

  LemmaGrid lemma = cfg.lemma;
  lemma.seed = cfg.sim.seed;
  try {
    report.checks.push_back(verify_lemma_and_bs(lemma));
  } catch (const std::exception& e) {
    report.checks.push_back(failure("lemma_and_bs_dominance", e));
  }
  try {
    report.checks.push_back(verify_sharpe_separation(*market, x0, cfg));
  } catch (const std::exception& e) {
    report.checks.push_back(failure("sharpe_separation", e));
  }
  for (double z : targets) {
    try {
      for (auto& rec : verify_wealth_cap(*market, x0, z, cfg)) report.checks.push_back(std::move(rec));
    } catch (const std::exception& e) {
      report.checks.push_back(failure("wealth_cap" + z_tag(z), e));
    }
    try {
      report.checks.push_back(verify_risky_exposure(*market, x0, z, cfg));
    } catch (const std::exception& e) {
      report.checks.push_back(failure("risky_exposure" + z_tag(z), e));
    }
    try {
      report.checks.push_back(verify_bond_allocation(*market, x0, z, cfg));
    } catch (const std::exception& e) {
      report.checks.push_back(failure("bond_allocation" + z_tag(z), e));
    }
  }
  report.pass = !report.checks.empty() &&
                std::all_of(report.checks.begin(), report.checks.end(),
                            [](const CheckRecord& c) { return c.pass; });
  return report;
}

}  // namespace mvp

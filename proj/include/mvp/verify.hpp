#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvp/market.hpp"
#include "mvp/simulate.hpp"

namespace mvp {

/// One pass/fail verdict. `statistic` is compared with `threshold` using
/// `comparison`; the record states its own rule so reports are
/// self-describing.
struct CheckRecord {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string comparison;
  bool pass = false;
  bool skipped = false;
  std::string detail;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
};

struct VerificationReport {
  std::vector<CheckRecord> checks;
  bool pass = false;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
};

nlohmann::json to_json(const VerificationReport& report);
VerificationReport report_from_json(const nlohmann::json& doc);
/// Canonical serialization (2-space indent, trailing newline).
std::string dump_report(const VerificationReport& report);

struct LemmaGrid {
  std::size_t n_b = 100;
  double b_lo = 0.1, b_hi = 5.0;
  std::size_t n_x = 100;  // log-spaced; includes x = 1 when the grid allows
  double x_lo = 0.01, x_hi = 10.0;
  std::size_t n_draws = 10000;
  double r_max = 0.1, excess_max = 0.5, sigma_max = 1.0, horizon_max = 10.0;
  std::uint64_t seed = 0;
};

struct VerifyConfig {
  SimConfig sim{100000, 250, 0, Scheme::Exact, 0, 1};
  std::size_t check_times = 32;
  std::vector<std::size_t> euler_steps{250, 500, 1000, 2000};
  std::size_t euler_paths = 10000;
  std::size_t region_strategies = 200;
  std::size_t region_paths = 100000;
  std::size_t region_steps = 20;
  double confidence_k = 3.0;
  LemmaGrid lemma;
};

/// Times at which the per-time checks are evaluated: `count` equispaced
/// times in (0, T], all curve breakpoints, and 0 when `include_zero`.
std::vector<double> check_times(const ValidatedMarket& market, std::size_t count,
                                bool include_zero);

/// Efficient wealth never exceeds gamma e^{-int_t^T r}: zero exact-scheme
/// violations, strictness (or equality at the risk-free target) on exact
/// paths, and Euler violation fractions non-increasing in the step count.
std::vector<CheckRecord> verify_wealth_cap(const ValidatedMarket& market, double x0, double z,
                                           const VerifyConfig& cfg);

/// Every exact path holds a nonzero risky position wherever B(t) != 0.
/// Skipped for the risk-free target.
CheckRecord verify_risky_exposure(const ValidatedMarket& market, double x0, double z,
                                  const VerifyConfig& cfg);

/// At every check time in (0, T] a positive fraction of exact paths holds a
/// bond position larger than 1e-9 x0 in magnitude.
CheckRecord verify_bond_allocation(const ValidatedMarket& market, double x0, double z,
                                   const VerifyConfig& cfg);

/// No sampled pure-risky strategy reaches the frontier slope at the
/// confidence_k standard-error level.
CheckRecord verify_sharpe_separation(const ValidatedMarket& market, double x0,
                                     const VerifyConfig& cfg);

/// Lemma margin >= -1e-12 on the grid (|margin| < 1e-10 at x = 1, > 0
/// elsewhere) and Black-Scholes dominance on every random draw.
CheckRecord verify_lemma_and_bs(const LemmaGrid& grid);

/// Runs every check for every target. Failures raised by individual checks
/// are recorded on that check; an invalid market yields a single failed
/// validation record.
VerificationReport run_all(const MarketModel& model, double x0, const std::vector<double>& targets,
                           const VerifyConfig& cfg);

}  // namespace mvp

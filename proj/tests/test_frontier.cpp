#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "mvp/error.hpp"
#include "mvp/frontier.hpp"

using namespace mvp;

namespace {

const ValidatedMarket& bs() {
  static const ValidatedMarket m = validate_market(black_scholes_market(0.06, 0.12, 0.15, 1.0));
  return m;
}

const ValidatedMarket& two_asset() {
  static const ValidatedMarket m = [] {
    Vector mu(2);
    mu << 0.08, 0.12;
    Matrix s(2, 2);
    s << 0.2, 0.0, 0.05, 0.25;
    return validate_market(constant_market(1.0, 0.02, mu, s));
  }();
  return m;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::SelfCheckFailed;
}

}  // namespace

// Frozen values below come from an independent high-precision evaluation of
// the closed forms (r = 0.06, mu = 0.12, sigma = 0.15, T = 1, x0 = 1).
TEST_CASE("closed forms for the one-stock market") {
  CHECK(gamma(bs(), 1.0, 1.2) == doctest::Approx(1.9962812512258195).epsilon(1e-13));
  CHECK(min_variance(bs(), 1.0, 1.2) == doctest::Approx(0.11001696759054118).epsilon(1e-13));
  CHECK(frontier_slope(bs()) == doctest::Approx(0.41654636115540644).epsilon(1e-14));
  CHECK(risk_free_payoff(bs(), 1.0) == doctest::Approx(std::exp(0.06)).epsilon(1e-15));

  const AllocationVector a = efficient_allocation(bs(), 1.0, 1.2, 0.0, 1.0);
  CHECK(a.risky(0) == doctest::Approx(2.346738350569771).epsilon(1e-13));
  CHECK(a.bond == doctest::Approx(1.0 - 2.346738350569771).epsilon(1e-12));
}

TEST_CASE("stock statistics and premium of the worked example") {
  const StockStats s = stock_stats_bs(0.12, 0.15, 0.06, 1.0);
  CHECK(s.mean_return == doctest::Approx(0.12749685157937568).epsilon(1e-14));
  CHECK(s.std_return == doctest::Approx(0.17008032763105324).epsilon(1e-13));
  CHECK(s.sharpe == doctest::Approx(0.38605467162815965).epsilon(1e-13));
  CHECK(std::abs(premium(frontier_slope(bs()), s.sharpe) - 0.0785) <= 1e-3);
  CHECK(premium(0.5, 0.4) == doctest::Approx(0.25));
}

TEST_CASE("two-asset frontier slope") {
  CHECK(frontier_slope(two_asset()) == doctest::Approx(0.47776751773311754).epsilon(1e-14));
}

TEST_CASE("every efficient point lies on the line through the risk-free point") {
  const double rf = bs().risk_free_return();
  const double slope = frontier_slope(bs());
  for (const auto& p : frontier_points(bs(), 1.0, std::exp(0.06), 3.0, 40)) {
    CHECK(p.mean_return == doctest::Approx(rf + slope * p.std_return).epsilon(1e-12));
    CHECK(p.se_std == 0.0);
  }
}

TEST_CASE("variance oracle: Var = (z - x0 e^{int r})^2 / (e^{int theta^2} - 1)") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double r = 0.01 + 0.1 * u(gen), mu = r + 0.01 + 0.4 * u(gen);
    const double sigma = 0.05 + 0.6 * u(gen), T = 0.1 + 5.0 * u(gen), x0 = 0.5 + 2.0 * u(gen);
    const ValidatedMarket m = validate_market(black_scholes_market(r, mu, sigma, T));
    const double th2 = std::pow((mu - r) / sigma, 2) * T;
    const double z = x0 * std::exp(r * T) * (1.0 + u(gen));
    const double var = std::pow(z - x0 * std::exp(r * T), 2) / (std::exp(th2) - 1.0);
    const double g = (z - x0 * std::exp(r * T - th2)) / (1.0 - std::exp(-th2));
    CHECK(min_variance(m, x0, z) == doctest::Approx(var).epsilon(1e-9));
    CHECK(gamma(m, x0, z) == doctest::Approx(g).epsilon(1e-9));
    CHECK(frontier_slope(m) == doctest::Approx(std::sqrt(std::exp(th2) - 1.0)).epsilon(1e-11));
  }
}

TEST_CASE("risk-free target") {
  const double zf = risk_free_payoff(bs(), 1.0);
  CHECK(is_risk_free_target(bs(), 1.0, zf));
  CHECK_FALSE(is_risk_free_target(bs(), 1.0, 1.2));
  CHECK(min_variance(bs(), 1.0, zf) == 0.0);
  CHECK(efficient_allocation(bs(), 1.0, zf, 0.5, 1.03).risky(0) == 0.0);
  CHECK(efficient_allocation(bs(), 1.0, zf, 0.5, 1.03).bond == 1.03);
  CHECK(code_of([&] { (void)gamma(bs(), 1.0, 1.0); }) == Errc::TargetBelowRiskFree);
  CHECK(frontier_points(bs(), 1.0, zf, zf, 1).size() == 1);
}

TEST_CASE("wealth cap and allocation at the cap") {
  const double g = gamma(bs(), 1.0, 1.2);
  CHECK(wealth_cap(bs(), g, 1.0) == doctest::Approx(g));
  CHECK(wealth_cap(bs(), g, 0.25) == doctest::Approx(g * std::exp(-0.06 * 0.75)));
  const AllocationVector a = efficient_allocation(bs(), 1.0, 1.2, 0.25, wealth_cap(bs(), g, 0.25));
  CHECK(std::abs(a.risky(0)) < 1e-12);
}

TEST_CASE("allocation sums to wealth") {
  const AllocationVector a = efficient_allocation(two_asset(), 1.0, 1.3, 0.4, 0.9);
  CHECK(a.risky.sum() + a.bond == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("lemma margin") {
  CHECK(lemma_margin(1.3, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> lb(0.1, 5.0), lx(-4.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    const double b = lb(gen), x = std::exp(lx(gen));
    const double m = lemma_margin(b, x);
    CHECK(m > 0.0);
    // symmetric under x -> 1/x
    CHECK(lemma_margin(b, 1.0 / x) == doctest::Approx(m).epsilon(1e-10));
  }
}

TEST_CASE("Black-Scholes dominance") {
  const Dominance d = bs_strict_dominance(0.12, 0.15, 0.06, 1.0);
  CHECK(d.holds);
  const double slope = frontier_slope(bs());
  const double stock = stock_stats_bs(0.12, 0.15, 0.06, 1.0).sharpe;
  CHECK(d.margin == doctest::Approx(slope * slope - stock * stock).epsilon(1e-10));
  CHECK(code_of([] { (void)bs_strict_dominance(0.05, 0.15, 0.06, 1.0); }) == Errc::BadParams);
}

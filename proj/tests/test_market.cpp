#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "mvp/error.hpp"
#include "mvp/market.hpp"
#include "mvp/market_io.hpp"

using namespace mvp;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

MarketModel two_asset() {
  return constant_market(1.0, 0.02, vec2(0.08, 0.12), mat2(0.2, 0.0, 0.05, 0.25));
}

// Rate and mu change at 0.5, sigma at 0.75; the merged grid has three pieces.
MarketModel staggered() {
  MarketModel m;
  m.horizon = 2.0;
  m.rate = ParameterCurve<double>({0.0, 0.5, 2.0}, {0.03, 0.05});
  m.appreciation = ParameterCurve<Vector>({0.0, 0.5, 2.0}, {vec2(0.09, 0.07), vec2(0.05, 0.11)});
  m.volatility = ParameterCurve<Matrix>({0.0, 0.75, 2.0}, {mat2(0.18, 0.02, 0.04, 0.22),
                                                            mat2(0.25, 0.0, 0.06, 0.3)});
  return m;
}

Errc code_of(const MarketModel& m) {
  try {
    (void)validate_market(m);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected validation error");
  return Errc::ParseError;
}

// Solve a 2x2 system by hand (Cramer's rule).
Vector cramer(const Matrix& a, const Vector& b) {
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return vec2((b(0) * a(1, 1) - a(0, 1) * b(1)) / det, (a(0, 0) * b(1) - b(0) * a(1, 0)) / det);
}

}  // namespace

TEST_CASE("curve lookup is right-continuous and clamps to the last interval") {
  ParameterCurve<double> c({0.0, 0.5, 1.0}, {1.0, 2.0});
  CHECK(c(0.0) == 1.0);
  CHECK(c(0.4999) == 1.0);
  CHECK(c(0.5) == 2.0);
  CHECK(c(1.0) == 2.0);
  CHECK_THROWS_AS(ParameterCurve<double>({0.0, 0.5}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(ParameterCurve<double>({0.1, 1.0}, {1.0}), Error);
  CHECK_THROWS_AS(ParameterCurve<double>({0.0, 0.5, 0.5}, {1.0, 2.0}), Error);
}

TEST_CASE("risk premium of the one-stock market") {
  const ValidatedMarket m = validate_market(black_scholes_market(0.06, 0.12, 0.15, 1.0));
  CHECK(m.risk_premium(0.3)(0) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(m.integrate(IntegralKind::Theta2, 0.0, 1.0) == doctest::Approx(0.16).epsilon(1e-14));
  CHECK(m.risk_free_return() == doctest::Approx(std::expm1(0.06)).epsilon(1e-14));
}

TEST_CASE("risk premium solves sigma theta = B in the two-asset market") {
  const ValidatedMarket m = validate_market(two_asset());
  const Vector theta = m.risk_premium(0.5);
  CHECK(theta(0) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(theta(1) == doctest::Approx(0.34).epsilon(1e-14));
  CHECK(m.integrate(IntegralKind::Theta2, 0.0, 1.0) == doctest::Approx(0.2056).epsilon(1e-13));
  const auto& iv = m.at(0.0);
  CHECK(iv.merton(0) == doctest::Approx(1.16).epsilon(1e-13));
  CHECK(iv.merton(1) == doctest::Approx(1.36).epsilon(1e-13));
}

TEST_CASE("theta2 agrees with B'(sigma sigma')^{-1} B on random markets") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 200; ++i) {
    const Matrix s = mat2(0.3 + u(gen), u(gen), u(gen), 0.3 + u(gen));
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    if (std::abs(det) < 0.05) continue;
    const Vector mu = vec2(0.1 + std::abs(u(gen)), 0.1 + std::abs(u(gen)));
    const ValidatedMarket m = validate_market(constant_market(1.0, 0.04, mu, s));
    const Vector b = mu - Vector::Constant(2, 0.04);
    const Vector theta = cramer(s, b);
    const Vector merton = cramer(s * s.transpose(), b);
    const auto& iv = m.at(0.0);
    CHECK((iv.theta - theta).norm() <= 1e-12 * (1.0 + theta.norm()));
    CHECK(iv.theta2 == doctest::Approx(b.dot(merton)).epsilon(1e-12));
  }
}

TEST_CASE("integrals over merged breakpoints are exact interval sums") {
  const ValidatedMarket m = validate_market(staggered());
  REQUIRE(m.breakpoints().size() == 4);
  CHECK(m.intervals().size() == 3);
  // int r over [0.2, 1.9]: 0.3 * 0.03 + 1.4 * 0.05.
  CHECK(m.integrate(IntegralKind::Rate, 0.2, 1.9) == doctest::Approx(0.3 * 0.03 + 1.4 * 0.05));

  // Independent oracle for int |theta|^2: midpoint evaluation per piece.
  const double cuts[] = {0.2, 0.5, 0.75, 1.9};
  double oracle = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    const Matrix s = staggered().volatility(mid);
    const Vector b = staggered().appreciation(mid) - Vector::Constant(2, staggered().rate(mid));
    oracle += cramer(s, b).squaredNorm() * (cuts[k + 1] - cuts[k]);
  }
  CHECK(m.integrate(IntegralKind::Theta2, 0.2, 1.9) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("integrals are additive") {
  const ValidatedMarket m = validate_market(staggered());
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    double a = u(gen), b = u(gen), c = u(gen);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    for (auto kind : {IntegralKind::Rate, IntegralKind::Theta2, IntegralKind::ExcessAbs}) {
      CHECK(m.integrate(kind, a, b) + m.integrate(kind, b, c) ==
            doctest::Approx(m.integrate(kind, a, c)).epsilon(1e-13));
    }
  }
  CHECK(m.integrate(IntegralKind::Theta2, 1.1, 1.1) == 0.0);
}

TEST_CASE("scaling sigma by c scales theta2 by 1/c^2") {
  MarketModel base = two_asset();
  MarketModel scaled = constant_market(1.0, 0.02, vec2(0.08, 0.12), 3.0 * mat2(0.2, 0.0, 0.05, 0.25));
  const double a = validate_market(base).integrate(IntegralKind::Theta2, 0.0, 1.0);
  const double b = validate_market(scaled).integrate(IntegralKind::Theta2, 0.0, 1.0);
  CHECK(b == doctest::Approx(a / 9.0).epsilon(1e-13));
}

TEST_CASE("validation errors") {
  MarketModel m = black_scholes_market(0.06, 0.12, 0.15, 1.0);
  m.delta = 0.1;
  CHECK(code_of(m) == Errc::Degenerate);
  CHECK(code_of(constant_market(1.0, 0.02, vec2(0.08, 0.12), mat2(0.2, 0.2, 0.1, 0.1))) ==
        Errc::Degenerate);
  CHECK(code_of(black_scholes_market(0.06, 0.06, 0.15, 1.0)) == Errc::Infeasible);
  CHECK(code_of(black_scholes_market(0.06, -0.1, 0.15, 1.0)) == Errc::BadParams);
  CHECK(code_of(black_scholes_market(0.0, 0.1, 0.15, 1.0)) == Errc::BadParams);

  MarketModel dims = two_asset();
  dims.volatility = ParameterCurve<Matrix>::constant(1.0, Matrix::Identity(3, 3));
  CHECK(code_of(dims) == Errc::BadDimensions);

  MarketModel horizon = two_asset();
  horizon.horizon = 2.0;
  CHECK(code_of(horizon) == Errc::BadHorizon);
}

TEST_CASE("a market with B = 0 on one interval only is feasible") {
  MarketModel m;
  m.horizon = 1.0;
  m.rate = ParameterCurve<double>::constant(1.0, 0.05);
  m.appreciation = ParameterCurve<Vector>({0.0, 0.5, 1.0}, {Vector::Constant(1, 0.05),
                                                              Vector::Constant(1, 0.1)});
  m.volatility = ParameterCurve<Matrix>::constant(1.0, Matrix::Constant(1, 1, 0.2));
  const ValidatedMarket v = validate_market(m);
  CHECK(v.risk_premium(0.25)(0) == 0.0);
  CHECK(v.integrate(IntegralKind::Theta2, 0.0, 1.0) == doctest::Approx(0.0625 * 0.5));
  CHECK(v.excess_discontinuous());
}

TEST_CASE("time queries outside the horizon") {
  const ValidatedMarket m = validate_market(two_asset());
  CHECK_THROWS_AS((void)m.at(1.5), Error);
  CHECK_THROWS_AS((void)m.integrate(IntegralKind::Rate, -0.1, 0.5), Error);
  try {
    (void)m.integrate(IntegralKind::Rate, 0.6, 0.5);
    FAIL("expected ReversedInterval");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ReversedInterval);
  }
}

TEST_CASE("market JSON round-trips bit for bit") {
  MarketModel m = staggered();
  m.delta = 1e-7;
  const MarketModel back = parse_market(dump_market(m));
  const ValidatedMarket a = validate_market(m), b = validate_market(back);
  REQUIRE(a.breakpoints() == b.breakpoints());
  for (std::size_t k = 0; k < a.intervals().size(); ++k) {
    CHECK(a.intervals()[k].rate == b.intervals()[k].rate);
    CHECK(a.intervals()[k].mu == b.intervals()[k].mu);
    CHECK(a.intervals()[k].sigma == b.intervals()[k].sigma);
  }
  CHECK(back.delta == m.delta);
  CHECK(dump_market(back) == dump_market(m));
}

TEST_CASE("malformed market documents") {
  auto code = [](const char* text) {
    try {
      (void)parse_market(text);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::SelfCheckFailed;
  };
  CHECK(code("{not json") == Errc::ParseError);
  CHECK(code(R"({"horizon": 1})") == Errc::ParseError);
  CHECK(code(R"({"horizon": -1, "breakpoints": [0, 1], "rate": [0.1], "mu": [[0.2]],
                "sigma": [[[0.1]]]})") == Errc::BadHorizon);
  CHECK(code(R"({"horizon": 1, "breakpoints": [0, 1], "rate": [0.1], "mu": [[0.2]],
                "sigma": [[[0.1, 0.2], [0.3]]]})") == Errc::BadDimensions);
}

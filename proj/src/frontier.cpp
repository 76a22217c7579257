#include "mvp/frontier.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mvp/io.hpp"

namespace mvp {

namespace {

// Below this value of int |theta|^2 the denominator of gamma is numerically
// meaningless.
constexpr double kMinThetaIntegral = 1e-12;

double theta2_integral(const ValidatedMarket& market) {
  return market.integrate(IntegralKind::Theta2, 0.0, market.horizon());
}

double rate_integral(const ValidatedMarket& market) {
  return market.integrate(IntegralKind::Rate, 0.0, market.horizon());
}

void require_positive_wealth(double x0) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw Error(Errc::BadParams, "initial wealth must be > 0");
}

}  // namespace

std::optional<double> sharpe_of(const DiagramPoint& p, double risk_free_return) {
  if (!(p.std_return > 0.0)) return std::nullopt;
  return (p.mean_return - risk_free_return) / p.std_return;
}

double risk_free_payoff(const ValidatedMarket& market, double x0) {
  return x0 * std::exp(rate_integral(market));
}

bool is_risk_free_target(const ValidatedMarket& market, double x0, double z) {
  require_positive_wealth(x0);
  const double floor = risk_free_payoff(market, x0);
  if (!std::isfinite(z) || z < floor * (1.0 - kTargetSlack)) {
    throw Error(Errc::TargetBelowRiskFree, "target " + format_full(z) +
                                               " is below the risk-free payoff " +
                                               format_full(floor));
  }
  return z <= floor;
}

double gamma(const ValidatedMarket& market, double x0, double z) {
  is_risk_free_target(market, x0, z);
  const double theta2 = theta2_integral(market);
  if (theta2 < kMinThetaIntegral) {
    throw Error(Errc::Infeasible, "int |theta|^2 = " + format_full(theta2) + " is too small");
  }
  const double numer = z - x0 * std::exp(rate_integral(market) - theta2);
  const double denom = -std::expm1(-theta2);
  return numer / denom;
}

double min_variance(const ValidatedMarket& market, double x0, double z) {
  if (is_risk_free_target(market, x0, z)) return 0.0;
  const double theta2 = theta2_integral(market);
  if (theta2 < kMinThetaIntegral) {
    throw Error(Errc::Infeasible, "int |theta|^2 = " + format_full(theta2) + " is too small");
  }
  const double gap = z - risk_free_payoff(market, x0);
  return gap * gap / std::expm1(theta2);
}

double frontier_slope(const ValidatedMarket& market) {
  return std::sqrt(std::expm1(theta2_integral(market)));
}

EfficientSolution efficient_solution(const ValidatedMarket& market, double x0, double z) {
  EfficientSolution s;
  s.target = z;
  s.gamma = gamma(market, x0, z);
  s.variance = min_variance(market, x0, z);
  s.std_return = std::sqrt(s.variance) / x0;
  s.mean_return = (z - x0) / x0;
  s.slope = frontier_slope(market);
  s.risk_free_return = market.risk_free_return();
  return s;
}

std::vector<DiagramPoint> frontier_points(const ValidatedMarket& market, double x0, double z_min,
                                          double z_max, int count) {
  if (count < 1) throw Error(Errc::BadParams, "count must be >= 1");
  if (!(z_max >= z_min)) throw Error(Errc::BadParams, "z_max must be >= z_min");
  is_risk_free_target(market, x0, z_min);

  std::vector<DiagramPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double z =
        count == 1 ? z_min : z_min + (z_max - z_min) * static_cast<double>(i) / (count - 1);
    DiagramPoint p;
    p.label = "efficient z=" + format_full(z);
    p.std_return = std::sqrt(min_variance(market, x0, z)) / x0;
    p.mean_return = (z - x0) / x0;
    out.push_back(std::move(p));
  }
  return out;
}

double wealth_cap(const ValidatedMarket& market, double gamma, double t) {
  return gamma * std::exp(-market.integrate(IntegralKind::Rate, t, market.horizon()));
}

AllocationVector efficient_allocation(const ValidatedMarket& market, double x0, double z,
                                      double t, double x) {
  const auto& iv = market.at(t);
  AllocationVector a;
  if (is_risk_free_target(market, x0, z)) {
    a.risky = Vector::Zero(static_cast<Eigen::Index>(market.assets()));
  } else {
    const double cap = wealth_cap(market, gamma(market, x0, z), t);
    a.risky = -iv.merton * (x - cap);
  }
  a.bond = x - a.risky.sum();
  return a;
}

StockStats stock_stats_bs(double mu, double sigma, double r, double T) {
  if (!(sigma > 0.0) || !(T > 0.0)) throw Error(Errc::BadParams, "need sigma > 0 and T > 0");
  StockStats s;
  s.mean_return = std::expm1(mu * T);
  s.std_return = std::exp(mu * T) * std::sqrt(std::expm1(sigma * sigma * T));
  s.sharpe = (s.mean_return - std::expm1(r * T)) / s.std_return;
  return s;
}

Dominance bs_strict_dominance(double mu, double sigma, double r, double T) {
  if (!(mu > r) || !(sigma > 0.0) || !(T > 0.0)) {
    throw Error(Errc::BadParams, "need mu > r, sigma > 0, T > 0");
  }
  const double ratio = (mu - r) / sigma;
  const double frontier = std::expm1(ratio * ratio * T);
  if (std::isinf(frontier)) return {true, std::numeric_limits<double>::infinity()};
  // (e^{mu T} - e^{r T})^2 = e^{2rT} (e^{(mu-r)T} - 1)^2 and
  // e^{(2mu+sigma^2)T} - e^{2mu T} = e^{2mu T} (e^{sigma^2 T} - 1).
  const double excess = std::expm1((mu - r) * T);
  const double stock = std::exp(2.0 * (r - mu) * T) * excess * excess / std::expm1(sigma * sigma * T);
  const double margin = frontier - stock;
  return {margin > 0.0, margin};
}

double lemma_margin(double b, double x) {
  if (!(b > 0.0) || !(x > 0.0)) throw Error(Errc::BadParams, "need b > 0 and x > 0");
  const double eb = std::expm1(b);
  return std::expm1(b * x) * std::expm1(b / x) - eb * eb;
}

double premium(double frontier_slope, double risky_sharpe) {
  if (!(risky_sharpe > 0.0)) throw Error(Errc::BadParams, "risky Sharpe ratio must be > 0");
  return frontier_slope / risky_sharpe - 1.0;
}

}  // namespace mvp

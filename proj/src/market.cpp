#include "mvp/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvp/io.hpp"

namespace mvp {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }
bool all_finite(const Matrix& m) { return m.allFinite(); }

template <class V>
void check_curve_horizon(const ParameterCurve<V>& curve, double horizon, const char* name) {
  if (curve.intervals() == 0) {
    throw Error(Errc::BadDimensions, std::string(name) + " curve is empty");
  }
  if (curve.horizon() != horizon) {
    throw Error(Errc::BadHorizon, std::string(name) + " curve ends at " +
                                      format_short(curve.horizon()) + ", horizon is " +
                                      format_short(horizon));
  }
}

}  // namespace

MarketModel constant_market(double horizon, double rate, Vector mu, Matrix sigma, double delta) {
  if (!(horizon > 0.0)) throw Error(Errc::BadHorizon, "horizon must be positive");
  MarketModel m;
  m.horizon = horizon;
  m.rate = ParameterCurve<double>::constant(horizon, rate);
  m.appreciation = ParameterCurve<Vector>::constant(horizon, std::move(mu));
  m.volatility = ParameterCurve<Matrix>::constant(horizon, std::move(sigma));
  m.delta = delta;
  return m;
}

MarketModel black_scholes_market(double rate, double mu, double sigma, double horizon) {
  return constant_market(horizon, rate, Vector::Constant(1, mu), Matrix::Constant(1, 1, sigma));
}

ValidatedMarket validate_market(const MarketModel& candidate) {
  if (!(candidate.horizon > 0.0) || !std::isfinite(candidate.horizon)) {
    throw Error(Errc::BadHorizon, "horizon must be positive and finite");
  }
  if (!(candidate.delta > 0.0)) {
    throw Error(Errc::BadParams, "eigenvalue floor delta must be positive");
  }
  const double T = candidate.horizon;
  check_curve_horizon(candidate.rate, T, "rate");
  check_curve_horizon(candidate.appreciation, T, "appreciation");
  check_curve_horizon(candidate.volatility, T, "volatility");

  const auto m = static_cast<std::size_t>(candidate.appreciation.values().front().size());
  if (m == 0) throw Error(Errc::BadDimensions, "market needs at least one stock");
  for (const auto& mu : candidate.appreciation.values()) {
    if (static_cast<std::size_t>(mu.size()) != m) {
      throw Error(Errc::BadDimensions, "appreciation vectors differ in length");
    }
    if (!all_finite(mu)) throw Error(Errc::BadParams, "appreciation rate is not finite");
    if ((mu.array() <= 0.0).any()) throw Error(Errc::BadParams, "appreciation rates must be > 0");
  }
  for (const auto& s : candidate.volatility.values()) {
    if (static_cast<std::size_t>(s.rows()) != m || static_cast<std::size_t>(s.cols()) != m) {
      throw Error(Errc::BadDimensions, "volatility must be " + std::to_string(m) + "x" +
                                           std::to_string(m) + ", got " +
                                           std::to_string(s.rows()) + "x" +
                                           std::to_string(s.cols()));
    }
    if (!all_finite(s)) throw Error(Errc::BadParams, "volatility is not finite");
  }
  for (double r : candidate.rate.values()) {
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(Errc::BadParams, "interest rate must be > 0");
  }

  // Nondegeneracy: smallest eigenvalue of sigma sigma' on every interval.
  for (std::size_t k = 0; k < candidate.volatility.intervals(); ++k) {
    const Matrix& s = candidate.volatility.values()[k];
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s * s.transpose(), Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (!(lo >= candidate.delta)) {
      throw Error(Errc::Degenerate, "smallest eigenvalue of sigma sigma' is " + format_short(lo) +
                                        " < delta on interval starting at " +
                                        format_short(candidate.volatility.breakpoints()[k]));
    }
  }

  ValidatedMarket out;
  out.model_ = candidate;
  out.assets_ = m;
  out.horizon_ = T;
  out.delta_ = candidate.delta;

  std::vector<double> bps;
  for (const auto* src : {&candidate.rate.breakpoints(), &candidate.appreciation.breakpoints(),
                          &candidate.volatility.breakpoints()}) {
    bps.insert(bps.end(), src->begin(), src->end());
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  out.breakpoints_ = bps;

  out.cum_rate_.assign(bps.size(), 0.0);
  out.cum_theta2_.assign(bps.size(), 0.0);
  out.cum_excess_.assign(bps.size(), 0.0);
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    ValidatedMarket::Interval iv;
    iv.start = bps[k];
    iv.end = bps[k + 1];
    iv.rate = candidate.rate(iv.start);
    iv.mu = candidate.appreciation(iv.start);
    iv.sigma = candidate.volatility(iv.start);
    iv.excess = iv.mu.array() - iv.rate;
    iv.theta = iv.sigma.fullPivLu().solve(iv.excess);
    iv.theta2 = iv.theta.squaredNorm();
    iv.merton = (iv.sigma * iv.sigma.transpose()).ldlt().solve(iv.excess);
    const double len = iv.end - iv.start;
    out.cum_rate_[k + 1] = out.cum_rate_[k] + iv.rate * len;
    out.cum_theta2_[k + 1] = out.cum_theta2_[k] + iv.theta2 * len;
    out.cum_excess_[k + 1] = out.cum_excess_[k] + iv.excess.cwiseAbs().sum() * len;
    out.intervals_.push_back(std::move(iv));
  }

  if (out.cum_excess_.back() == 0.0) {
    throw Error(Errc::Infeasible, "mu(t) equals r(t) for every stock on all of [0, T]");
  }
  return out;
}

const ValidatedMarket::Interval& ValidatedMarket::at(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw Error(Errc::OutOfHorizon, "time " + format_short(t) + " outside [0, " +
                                        format_short(horizon_) + "]");
  }
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return intervals_[std::min(idx, intervals_.size() - 1)];
}

Vector ValidatedMarket::risk_premium(double t) const { return at(t).theta; }

double ValidatedMarket::cumulative(IntegralKind kind, double t) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  std::size_t k = std::min(static_cast<std::size_t>(it - breakpoints_.begin()) - 1,
                           intervals_.size() - 1);
  const Interval& iv = intervals_[k];
  const double dt = t - iv.start;
  switch (kind) {
    case IntegralKind::Rate: return cum_rate_[k] + iv.rate * dt;
    case IntegralKind::Theta2: return cum_theta2_[k] + iv.theta2 * dt;
    case IntegralKind::ExcessAbs: return cum_excess_[k] + iv.excess.cwiseAbs().sum() * dt;
  }
  return 0.0;
}

double ValidatedMarket::integrate(IntegralKind kind, double t0, double t1) const {
  if (!(t0 >= 0.0 && t0 <= horizon_) || !(t1 >= 0.0 && t1 <= horizon_)) {
    throw Error(Errc::OutOfHorizon, "integration bounds outside [0, T]");
  }
  if (t1 < t0) throw Error(Errc::ReversedInterval, "integration bounds reversed");
  if (t0 == t1) return 0.0;
  return cumulative(kind, t1) - cumulative(kind, t0);
}

double ValidatedMarket::risk_free_return() const { return std::expm1(cum_rate_.back()); }

bool ValidatedMarket::excess_discontinuous() const {
  for (std::size_t k = 1; k < intervals_.size(); ++k) {
    if (intervals_[k].excess != intervals_[k - 1].excess) return true;
  }
  return false;
}

Vector risk_premium(const ValidatedMarket& market, double t) { return market.risk_premium(t); }

double integrate(const ValidatedMarket& market, IntegralKind kind, double t0, double t1) {
  return market.integrate(kind, t0, t1);
}

}  // namespace mvp

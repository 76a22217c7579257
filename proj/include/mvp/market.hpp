#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mvp/curve.hpp"

namespace mvp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Deterministic opportunity set: bond rate r(t), stock appreciation rates
/// mu(t) and volatility matrix sigma(t), all piecewise constant on [0, T].
/// The three curves may use different breakpoints.
struct MarketModel {
  double horizon = 0.0;
  ParameterCurve<double> rate;
  ParameterCurve<Vector> appreciation;
  ParameterCurve<Matrix> volatility;
  double delta = 1e-8;  // floor on the smallest eigenvalue of sigma sigma'
};

/// Convenience constructor for a single-interval market.
MarketModel constant_market(double horizon, double rate, Vector mu, Matrix sigma,
                            double delta = 1e-8);

/// Black-Scholes market with one stock.
MarketModel black_scholes_market(double rate, double mu, double sigma, double horizon);

enum class IntegralKind { Rate, Theta2, ExcessAbs };

/// Immutable, validated market. Holds the common refinement of all curve
/// breakpoints together with per-interval derived quantities, so every time
/// integral is an exact sum over intervals.
class ValidatedMarket {
 public:
  struct Interval {
    double start;
    double end;
    double rate;
    Vector mu;
    Matrix sigma;
    Vector excess;         // B = mu - r 1
    Vector theta;          // solves sigma theta = B
    double theta2;         // |theta|^2
    Vector merton;         // (sigma sigma')^{-1} B
  };

  std::size_t assets() const { return assets_; }
  double horizon() const { return horizon_; }
  double delta() const { return delta_; }
  const MarketModel& model() const { return model_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Interval>& intervals() const { return intervals_; }

  /// Interval containing t (right-continuous); throws OutOfHorizon.
  const Interval& at(double t) const;

  /// Risk premium theta(t) as a column vector.
  Vector risk_premium(double t) const;

  /// Exact integral of the chosen quantity over [t0, t1]. For ExcessAbs the
  /// integrand is sum_i |mu_i(t) - r(t)|.
  double integrate(IntegralKind kind, double t0, double t1) const;

  /// exp(int_0^T r) - 1.
  double risk_free_return() const;

  /// True when the excess-return vector jumps at some interior breakpoint.
  bool excess_discontinuous() const;

 private:
  friend ValidatedMarket validate_market(const MarketModel& candidate);
  ValidatedMarket() = default;

  double cumulative(IntegralKind kind, double t) const;

  MarketModel model_;
  std::size_t assets_ = 0;
  double horizon_ = 0.0;
  double delta_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<Interval> intervals_;
  // Running integrals at each breakpoint, one array per kind.
  std::vector<double> cum_rate_, cum_theta2_, cum_excess_;
};

/// Checks dimensions, horizon, positivity, the eigenvalue floor and
/// feasibility, and precomputes the per-interval quantities.
ValidatedMarket validate_market(const MarketModel& candidate);

/// Free-function forms of the member queries.
Vector risk_premium(const ValidatedMarket& market, double t);
double integrate(const ValidatedMarket& market, IntegralKind kind, double t0, double t1);

}  // namespace mvp

#pragma once

#include <vector>

#include "mvp/diagram.hpp"
#include "mvp/market.hpp"

namespace mvp {

/// Closed-form description of the efficient portfolio for target z.
struct EfficientSolution {
  double target = 0.0;
  double gamma = 0.0;
  double variance = 0.0;          // Var x*(T)
  double std_return = 0.0;        // sigma of R*(T)
  double mean_return = 0.0;       // E R*(T) = (z - x0) / x0
  double slope = 0.0;             // Sharpe ratio of every efficient portfolio
  double risk_free_return = 0.0;  // R_f(T) = exp(int r) - 1
};

/// Money amounts: `risky` per stock and the bond remainder, which always sum
/// to current wealth.
struct AllocationVector {
  Vector risky;
  double bond = 0.0;
};

/// Targets within this relative distance below x0 e^{int r} are treated as
/// the risk-free target itself.
inline constexpr double kTargetSlack = 1e-12;

/// x0 * exp(int_0^T r).
double risk_free_payoff(const ValidatedMarket& market, double x0);

/// True when z sits on the risk-free payoff (the degenerate efficient target).
/// Throws TargetBelowRiskFree for targets strictly below it.
bool is_risk_free_target(const ValidatedMarket& market, double x0, double z);

double gamma(const ValidatedMarket& market, double x0, double z);
double min_variance(const ValidatedMarket& market, double x0, double z);
double frontier_slope(const ValidatedMarket& market);
EfficientSolution efficient_solution(const ValidatedMarket& market, double x0, double z);

/// `count` equally spaced targets on [z_min, z_max], returned as diagram
/// points sorted by standard deviation.
std::vector<DiagramPoint> frontier_points(const ValidatedMarket& market, double x0, double z_min,
                                          double z_max, int count);

/// Deterministic cap gamma * exp(-int_t^T r) on efficient wealth at time t.
double wealth_cap(const ValidatedMarket& market, double gamma, double t);

/// Efficient feedback allocation at (t, x):
///   risky = -(sigma sigma')^{-1} B (x - gamma e^{-int_t^T r}).
/// The risk-free target maps to the all-bond policy.
AllocationVector efficient_allocation(const ValidatedMarket& market, double x0, double z,
                                      double t, double x);

struct StockStats {
  double mean_return;
  double std_return;
  double sharpe;
};

/// Terminal return statistics of a single Black-Scholes stock held over [0, T].
StockStats stock_stats_bs(double mu, double sigma, double r, double T);

struct Dominance {
  bool holds;
  double margin;
};

/// Frontier Sharpe squared minus stock Sharpe squared, in the rearranged form
///   (e^{((mu-r)/sigma)^2 T} - 1) - (e^{mu T} - e^{r T})^2 / (e^{(2mu+sigma^2)T} - e^{2mu T}).
Dominance bs_strict_dominance(double mu, double sigma, double r, double T);

/// (e^{bx} - 1)(e^{b/x} - 1) - (e^b - 1)^2; nonnegative, zero only at x = 1.
double lemma_margin(double b, double x);

/// Relative Sharpe increase of the frontier over a risky portfolio.
double premium(double frontier_slope, double risky_sharpe);

}  // namespace mvp

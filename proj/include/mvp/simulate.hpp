#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mvp/market.hpp"

namespace mvp {

// Weight processes alpha(t) used to combine the bond with a risky strategy.

struct AlphaConstant {
  double level = 1.0;
};
struct AlphaDeterministic {
  ParameterCurve<double> levels;
};
/// `high` while the combined wealth is below `barrier`, `low` otherwise.
struct AlphaThreshold {
  double barrier = 1.0;
  double high = 1.0;
  double low = 0.0;
};
/// Markov regime switching: leaves the current level at rate `intensity`
/// and jumps to one of the other levels uniformly. Starts at levels[0].
struct AlphaRandomSwitch {
  double intensity = 1.0;
  std::vector<double> levels;
};
using AlphaSpec = std::variant<AlphaConstant, AlphaDeterministic, AlphaThreshold, AlphaRandomSwitch>;

std::string describe(const AlphaSpec& alpha);

struct Strategy;

/// Efficient feedback policy for target z.
struct EfficientStrategy {
  double target = 0.0;
};
/// Pure risky constant mix: pi(t) = w x(t) with sum(w) = 1.
struct ConstantMixStrategy {
  Vector weights;
};
/// pi_alpha(t) = alpha(t) pi(t), where pi is the allocation of `risky` run on
/// its own wealth from the same initial endowment and the same Brownian path.
struct CombinationStrategy {
  std::shared_ptr<const Strategy> risky;
  AlphaSpec alpha;
};
/// Arbitrary feedback rule (t, x) -> risky money amounts. The rule is called
/// concurrently from simulation workers and must not keep mutable state.
struct FeedbackStrategy {
  std::function<Vector(double t, double x)> rule;
  std::string name = "feedback";
};

struct Strategy {
  std::variant<EfficientStrategy, ConstantMixStrategy, CombinationStrategy, FeedbackStrategy> kind;

  static Strategy efficient(double target);
  /// Throws BadParams unless the weights sum to one.
  static Strategy constant_mix(Vector weights);
  static Strategy combination(Strategy risky, AlphaSpec alpha);
  static Strategy feedback(std::function<Vector(double, double)> rule, std::string name = "feedback");

  std::string label() const;
};

enum class Scheme { Euler, Exact };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);

struct SimConfig {
  std::size_t n_paths = 10000;
  std::size_t n_steps = 250;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::Euler;
  std::uint32_t stream = 0;  // independent substream selector
  unsigned workers = 1;
};

struct PathEnsemble {
  std::vector<double> terminal_wealth;
  // Efficient runs only: (path, grid time) pairs with x above the cap plus
  // tolerance, and the number of pairs examined.
  std::uint64_t cap_violations = 0;
  std::uint64_t cap_checks = 0;
  double x0 = 0.0;
  double risk_free_return = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
  Scheme scheme = Scheme::Euler;
  std::size_t n_steps = 0;
};

/// Relative tolerance on the wealth cap, as a multiple of gamma.
inline constexpr double kCapTolerance = 1e-9;
/// Paths whose wealth exceeds this multiple of x0 in magnitude abort the run.
inline constexpr double kBlowupFactor = 1e12;

/// Simulates the self-financed wealth equation under `strategy`. The Euler
/// scheme evaluates the feedback rule at the left end of each step, grows
/// wealth by the exact bond factor and adds B'pi dt + pi' sigma dW. The exact
/// scheme is available for efficient strategies only.
PathEnsemble simulate_wealth(const ValidatedMarket& market, double x0, const Strategy& strategy,
                             const SimConfig& cfg);

/// Closed-form simulation of efficient wealth on the uniform grid of `cfg`.
PathEnsemble exact_efficient_paths(const ValidatedMarket& market, double x0, double z,
                                   const SimConfig& cfg);

/// Receives the full wealth path (one value per grid time) of each simulated
/// path. `worker` is in [0, cfg.workers) and lets callers keep per-worker
/// accumulators without locking.
using PathVisitor =
    std::function<void(unsigned worker, std::uint32_t path, std::span<const double> wealth)>;

/// Exact efficient simulation on an arbitrary increasing grid from 0 to T.
PathEnsemble exact_efficient_paths(const ValidatedMarket& market, double x0, double z,
                                   const SimConfig& cfg, std::span<const double> grid,
                                   const PathVisitor& visit);

std::vector<double> uniform_grid(double horizon, std::size_t n_steps);

struct TerminalStats {
  std::size_t n = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  std::optional<double> sharpe;  // absent when std_return == 0
  double se_mean = 0.0;
  double se_std = 0.0;
};

/// Sample statistics of R(T) = (x(T) - x0) / x0 with standard errors
/// std/sqrt(n) and std/sqrt(2(n-1)).
TerminalStats estimate_terminal_stats(const PathEnsemble& ensemble, double x0);

/// Runs fn(worker, index) for index in [0, n) split into contiguous blocks.
/// Rethrows the exception raised at the smallest index, if any.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(unsigned, std::size_t)>& fn);

}  // namespace mvp

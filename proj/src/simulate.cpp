#include "mvp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "mvp/frontier.hpp"
#include "mvp/io.hpp"
#include "mvp/rng.hpp"

namespace mvp {

// ---------------------------------------------------------------- strategies

std::string describe(const AlphaSpec& alpha) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, AlphaConstant>) {
          return "alpha=" + format_full(a.level);
        } else if constexpr (std::is_same_v<T, AlphaDeterministic>) {
          return "alpha=deterministic[" + std::to_string(a.levels.intervals()) + "]";
        } else if constexpr (std::is_same_v<T, AlphaThreshold>) {
          return "alpha=threshold(barrier=" + format_full(a.barrier) + ";high=" +
                 format_full(a.high) + ";low=" + format_full(a.low) + ")";
        } else {
          return "alpha=switch(intensity=" + format_full(a.intensity) + ";levels=" +
                 std::to_string(a.levels.size()) + ")";
        }
      },
      alpha);
}

Strategy Strategy::efficient(double target) { return Strategy{EfficientStrategy{target}}; }

Strategy Strategy::constant_mix(Vector weights) {
  if (weights.size() == 0 || !weights.allFinite()) {
    throw Error(Errc::BadParams, "constant mix needs finite weights");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw Error(Errc::BadParams, "pure risky weights must sum to 1, got " + format_full(weights.sum()));
  }
  return Strategy{ConstantMixStrategy{std::move(weights)}};
}

Strategy Strategy::combination(Strategy risky, AlphaSpec alpha) {
  if (const auto* sw = std::get_if<AlphaRandomSwitch>(&alpha)) {
    if (sw->levels.empty() || !(sw->intensity >= 0.0)) {
      throw Error(Errc::BadParams, "random switch needs levels and a nonnegative intensity");
    }
  }
  return Strategy{CombinationStrategy{std::make_shared<const Strategy>(std::move(risky)),
                                      std::move(alpha)}};
}

Strategy Strategy::feedback(std::function<Vector(double, double)> rule, std::string name) {
  return Strategy{FeedbackStrategy{std::move(rule), std::move(name)}};
}

std::string Strategy::label() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EfficientStrategy>) {
          return "efficient(z=" + format_full(s.target) + ")";
        } else if constexpr (std::is_same_v<T, ConstantMixStrategy>) {
          std::string out = "constant_mix(";
          for (Eigen::Index i = 0; i < s.weights.size(); ++i) {
            if (i) out += ";";
            out += format_full(s.weights[i]);
          }
          return out + ")";
        } else if constexpr (std::is_same_v<T, CombinationStrategy>) {
          return "combination(" + s.risky->label() + ";" + describe(s.alpha) + ")";
        } else {
          return s.name;
        }
      },
      kind);
}

std::string to_string(Scheme scheme) { return scheme == Scheme::Exact ? "exact" : "euler"; }

Scheme parse_scheme(const std::string& text) {
  if (text == "euler") return Scheme::Euler;
  if (text == "exact") return Scheme::Exact;
  throw Error(Errc::BadParams, "unknown scheme '" + text + "'");
}

std::vector<double> uniform_grid(double horizon, std::size_t n_steps) {
  std::vector<double> grid(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) {
    grid[k] = horizon * static_cast<double>(k) / static_cast<double>(n_steps);
  }
  grid.back() = horizon;
  return grid;
}

// ---------------------------------------------------------------- parallelism

void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(unsigned, std::size_t)>& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(0, i);
    return;
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::mutex mu;
  std::size_t failed_at = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([&, w, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          fn(w, i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (i < failed_at) {
            failed_at = i;
            failure = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------- engine

namespace {

void check_config(const SimConfig& cfg) {
  if (cfg.n_paths < 1 || cfg.n_steps < 1) {
    throw Error(Errc::BadParams, "n_paths and n_steps must be >= 1");
  }
  constexpr std::size_t limit = std::numeric_limits<std::uint32_t>::max();
  if (cfg.n_paths > limit || cfg.n_steps >= limit) {
    throw Error(Errc::BadParams, "n_paths and n_steps must fit in 32 bits");
  }
}

[[noreturn]] void blowup(std::uint32_t path, std::size_t step, double x) {
  throw Error(Errc::NumericalBlowup, "wealth " + format_full(x) + " on path " +
                                         std::to_string(path) + " at step " +
                                         std::to_string(step));
}

struct Step {
  double t;
  double dt;
  double sqrt_dt;
  double growth;  // exp(int r) over the step
  const ValidatedMarket::Interval* iv;
};

std::vector<Step> make_steps(const ValidatedMarket& market, std::span<const double> grid) {
  std::vector<Step> steps;
  steps.reserve(grid.size() - 1);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    Step s;
    s.t = grid[k];
    s.dt = grid[k + 1] - grid[k];
    s.sqrt_dt = std::sqrt(s.dt);
    s.growth = std::exp(market.integrate(IntegralKind::Rate, grid[k], grid[k + 1]));
    s.iv = &market.at(grid[k]);
    steps.push_back(s);
  }
  return steps;
}

// A strategy tree flattened children-first; every node runs its own wealth
// process driven by the shared Brownian increments.
struct Node {
  enum class Kind { Efficient, ConstantMix, Feedback, Combination } kind;
  int child = -1;
  double gamma = 0.0;
  bool risk_free = false;
  Vector weights;
  const FeedbackStrategy* feedback = nullptr;
  const AlphaSpec* alpha = nullptr;
  std::vector<double> caps;  // efficient nodes: cap at every grid time
};

int flatten(const Strategy& s, const ValidatedMarket& market, double x0,
            std::span<const double> grid, std::vector<Node>& out) {
  Node node{};
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EfficientStrategy>) {
          node.kind = Node::Kind::Efficient;
          node.risk_free = is_risk_free_target(market, x0, v.target);
          node.gamma = gamma(market, x0, v.target);
          node.caps.reserve(grid.size());
          for (double t : grid) node.caps.push_back(wealth_cap(market, node.gamma, t));
        } else if constexpr (std::is_same_v<T, ConstantMixStrategy>) {
          if (static_cast<std::size_t>(v.weights.size()) != market.assets()) {
            throw Error(Errc::BadDimensions, "constant mix has " + std::to_string(v.weights.size()) +
                                                 " weights for " + std::to_string(market.assets()) +
                                                 " stocks");
          }
          node.kind = Node::Kind::ConstantMix;
          node.weights = v.weights;
        } else if constexpr (std::is_same_v<T, FeedbackStrategy>) {
          if (!v.rule) throw Error(Errc::BadParams, "feedback strategy has no rule");
          node.kind = Node::Kind::Feedback;
          node.feedback = &v;
        } else {
          if (!v.risky) throw Error(Errc::BadParams, "combination has no risky strategy");
          node.kind = Node::Kind::Combination;
          node.child = flatten(*v.risky, market, x0, grid, out);
          node.alpha = &v.alpha;
        }
      },
      s.kind);
  out.push_back(std::move(node));
  return static_cast<int>(out.size()) - 1;
}

double alpha_level(const AlphaSpec& alpha, double t, double wealth, std::size_t& regime,
                   const CounterRng& rng, std::uint32_t path, std::uint32_t step,
                   std::uint32_t node, double dt) {
  return std::visit(
      [&](const auto& a) -> double {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, AlphaConstant>) {
          return a.level;
        } else if constexpr (std::is_same_v<T, AlphaDeterministic>) {
          return a.levels(t);
        } else if constexpr (std::is_same_v<T, AlphaThreshold>) {
          return wealth < a.barrier ? a.high : a.low;
        } else {
          const std::size_t n = a.levels.size();
          if (step > 0 && n > 1) {
            const auto u = rng.uniform_pair(path, step, kAuxLane + node);
            if (u[0] < -std::expm1(-a.intensity * dt)) {
              std::size_t jump = 1 + std::min(static_cast<std::size_t>(u[1] * (n - 1)), n - 2);
              regime = (regime + jump) % n;
            }
          }
          return a.levels[regime];
        }
      },
      alpha);
}

PathEnsemble empty_ensemble(const ValidatedMarket& market, double x0, const SimConfig& cfg,
                            std::size_t n_steps) {
  PathEnsemble e;
  e.terminal_wealth.assign(cfg.n_paths, 0.0);
  e.x0 = x0;
  e.risk_free_return = market.risk_free_return();
  e.seed = cfg.seed;
  e.stream = cfg.stream;
  e.scheme = cfg.scheme;
  e.n_steps = n_steps;
  return e;
}

PathEnsemble simulate_euler(const ValidatedMarket& market, double x0, const Strategy& strategy,
                            const SimConfig& cfg) {
  const std::vector<double> grid = uniform_grid(market.horizon(), cfg.n_steps);
  const std::vector<Step> steps = make_steps(market, grid);
  std::vector<Node> nodes;
  const int root = flatten(strategy, market, x0, grid, nodes);
  const bool track_cap = nodes[static_cast<std::size_t>(root)].kind == Node::Kind::Efficient;
  const double cap_tol = kCapTolerance * nodes[static_cast<std::size_t>(root)].gamma;

  const auto m = static_cast<Eigen::Index>(market.assets());
  const CounterRng rng(cfg.seed, cfg.stream);
  const double limit = kBlowupFactor * x0;
  const unsigned workers = std::max(1u, cfg.workers);

  PathEnsemble ens = empty_ensemble(market, x0, cfg, cfg.n_steps);
  std::vector<std::uint64_t> violations(workers, 0);

  struct Scratch {
    std::vector<double> wealth;
    std::vector<std::size_t> regime;
    std::vector<Vector> alloc;
    Vector dw;
    std::vector<double> z;
  };
  std::vector<Scratch> scratch(workers);
  for (auto& s : scratch) {
    s.wealth.resize(nodes.size());
    s.regime.resize(nodes.size());
    s.alloc.assign(nodes.size(), Vector::Zero(m));
    s.dw.resize(m);
    s.z.resize(static_cast<std::size_t>(m));
  }

  parallel_for(cfg.n_paths, workers, [&](unsigned w, std::size_t index) {
    Scratch& s = scratch[w];
    const auto path = static_cast<std::uint32_t>(index);
    std::fill(s.wealth.begin(), s.wealth.end(), x0);
    std::fill(s.regime.begin(), s.regime.end(), 0);
    std::uint64_t local_violations = 0;
    const Node& top = nodes[static_cast<std::size_t>(root)];

    for (std::size_t k = 0; k < steps.size(); ++k) {
      const Step& st = steps[k];
      if (track_cap && s.wealth[static_cast<std::size_t>(root)] > top.caps[k] + cap_tol) {
        ++local_violations;
      }
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        const Node& node = nodes[n];
        Vector& pi = s.alloc[n];
        const double x = s.wealth[n];
        switch (node.kind) {
          case Node::Kind::Efficient:
            if (node.risk_free) {
              pi.setZero();
            } else {
              pi.noalias() = -(x - node.caps[k]) * st.iv->merton;
            }
            break;
          case Node::Kind::ConstantMix:
            pi.noalias() = x * node.weights;
            break;
          case Node::Kind::Feedback:
            pi = node.feedback->rule(st.t, x);
            if (pi.size() != m) {
              throw Error(Errc::BadDimensions, "feedback rule returned " +
                                                   std::to_string(pi.size()) + " allocations");
            }
            break;
          case Node::Kind::Combination: {
            const double a = alpha_level(*node.alpha, st.t, x, s.regime[n], rng, path,
                                         static_cast<std::uint32_t>(k),
                                         static_cast<std::uint32_t>(n), st.dt);
            pi.noalias() = a * s.alloc[static_cast<std::size_t>(node.child)];
            break;
          }
        }
      }
      rng.normals(path, static_cast<std::uint32_t>(k), s.z.data(), static_cast<int>(m));
      for (Eigen::Index j = 0; j < m; ++j) s.dw[j] = st.sqrt_dt * s.z[static_cast<std::size_t>(j)];
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        const Vector& pi = s.alloc[n];
        const Matrix& sigma = st.iv->sigma;
        double drift = 0.0, noise = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
          drift += st.iv->excess[i] * pi[i];
          double loading = 0.0;
          for (Eigen::Index j = 0; j < m; ++j) loading += sigma(i, j) * s.dw[j];
          noise += pi[i] * loading;
        }
        drift *= st.dt;
        const double next = s.wealth[n] * st.growth + drift + noise;
        if (!std::isfinite(next) || std::abs(next) > limit) blowup(path, k + 1, next);
        s.wealth[n] = next;
      }
    }
    const double xT = s.wealth[static_cast<std::size_t>(root)];
    if (track_cap && xT > top.caps.back() + cap_tol) ++local_violations;
    ens.terminal_wealth[index] = xT;
    violations[w] += local_violations;
  });

  if (track_cap) {
    for (auto v : violations) ens.cap_violations += v;
    ens.cap_checks = static_cast<std::uint64_t>(cfg.n_paths) * (cfg.n_steps + 1);
  }
  return ens;
}

}  // namespace

PathEnsemble exact_efficient_paths(const ValidatedMarket& market, double x0, double z,
                                   const SimConfig& cfg, std::span<const double> grid,
                                   const PathVisitor& visit) {
  check_config(cfg);
  if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != market.horizon()) {
    throw Error(Errc::BadParams, "grid must run from 0 to T");
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw Error(Errc::BadParams, "grid must be increasing");
  }
  const bool risk_free = is_risk_free_target(market, x0, z);
  const double g = gamma(market, x0, z);
  const double T = market.horizon();
  const double y0 =
      risk_free ? 0.0
                : (x0 - z * std::exp(-market.integrate(IntegralKind::Rate, 0.0, T))) /
                      -std::expm1(-market.integrate(IntegralKind::Theta2, 0.0, T));

  const std::size_t n_steps = grid.size() - 1;
  std::vector<double> caps(grid.size()), drift(n_steps), vol(n_steps);
  for (std::size_t k = 0; k < grid.size(); ++k) caps[k] = wealth_cap(market, g, grid[k]);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double ir = market.integrate(IntegralKind::Rate, grid[k], grid[k + 1]);
    const double it = market.integrate(IntegralKind::Theta2, grid[k], grid[k + 1]);
    drift[k] = ir - 1.5 * it;
    vol[k] = std::sqrt(it);
  }

  const CounterRng rng(cfg.seed, cfg.stream);
  const unsigned workers = std::max(1u, cfg.workers);
  const double tol = kCapTolerance * g;
  const double limit = kBlowupFactor * x0;

  PathEnsemble ens = empty_ensemble(market, x0, cfg, n_steps);
  ens.scheme = Scheme::Exact;
  std::vector<std::uint64_t> violations(workers, 0);
  std::vector<std::vector<double>> buffers(workers, std::vector<double>(grid.size()));

  parallel_for(cfg.n_paths, workers, [&](unsigned w, std::size_t index) {
    const auto path = static_cast<std::uint32_t>(index);
    std::vector<double>& wealth = buffers[w];
    double log_scale = 0.0;
    std::uint64_t local = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (k > 0) {
        // Only one draw per step: int theta dW over the step is a scalar
        // Gaussian with variance int |theta|^2.
        const double z0 = rng.normal_pair(path, static_cast<std::uint32_t>(k - 1), 0)[0];
        log_scale += drift[k - 1] - vol[k - 1] * z0;
      }
      const double y = y0 * std::exp(log_scale);
      const double x = y + caps[k];
      if (!std::isfinite(x) || std::abs(x) > limit) blowup(path, k, x);
      if (x > caps[k] + tol) ++local;
      wealth[k] = x;
    }
    ens.terminal_wealth[index] = wealth.back();
    violations[w] += local;
    if (visit) visit(w, path, wealth);
  });

  for (auto v : violations) ens.cap_violations += v;
  ens.cap_checks = static_cast<std::uint64_t>(cfg.n_paths) * grid.size();
  return ens;
}

PathEnsemble exact_efficient_paths(const ValidatedMarket& market, double x0, double z,
                                   const SimConfig& cfg) {
  check_config(cfg);
  const std::vector<double> grid = uniform_grid(market.horizon(), cfg.n_steps);
  return exact_efficient_paths(market, x0, z, cfg, grid, nullptr);
}

PathEnsemble simulate_wealth(const ValidatedMarket& market, double x0, const Strategy& strategy,
                             const SimConfig& cfg) {
  check_config(cfg);
  if (!(x0 > 0.0)) throw Error(Errc::BadParams, "initial wealth must be > 0");
  if (cfg.scheme == Scheme::Exact) {
    const auto* eff = std::get_if<EfficientStrategy>(&strategy.kind);
    if (!eff) {
      throw Error(Errc::SchemeMismatch, "exact scheme requires an efficient strategy, got " +
                                            strategy.label());
    }
    return exact_efficient_paths(market, x0, eff->target, cfg);
  }
  return simulate_euler(market, x0, strategy, cfg);
}

TerminalStats estimate_terminal_stats(const PathEnsemble& ensemble, double x0) {
  const auto& xs = ensemble.terminal_wealth;
  const std::size_t n = xs.size();
  if (n < 2) throw Error(Errc::DegenerateEnsemble, "need at least two paths for statistics");
  TerminalStats s;
  s.n = n;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (*lo == *hi) {
    s.mean_return = (*lo - x0) / x0;
    return s;
  }
  double sum = 0.0;
  for (double x : xs) sum += (x - x0) / x0;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) {
    const double d = (x - x0) / x0 - mean;
    ss += d * d;
  }
  s.mean_return = mean;
  s.std_return = std::sqrt(ss / static_cast<double>(n - 1));
  s.se_mean = s.std_return / std::sqrt(static_cast<double>(n));
  s.se_std = s.std_return / std::sqrt(2.0 * static_cast<double>(n - 1));
  if (s.std_return > 0.0) s.sharpe = (s.mean_return - ensemble.risk_free_return) / s.std_return;
  return s;
}

}  // namespace mvp

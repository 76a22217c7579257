#include "mvp/region.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "mvp/frontier.hpp"
#include "mvp/io.hpp"
#include "mvp/rng.hpp"

namespace mvp {

DiagramPoint constant_mix_point(const ValidatedMarket& market, const Vector& weights,
                                std::string label) {
  if (static_cast<std::size_t>(weights.size()) != market.assets()) {
    throw Error(Errc::BadDimensions, "weight vector length does not match the market");
  }
  double log_mean = 0.0, log_var = 0.0;
  for (const auto& iv : market.intervals()) {
    const double len = iv.end - iv.start;
    log_mean += weights.dot(iv.mu) * len;
    log_var += (iv.sigma.transpose() * weights).squaredNorm() * len;
  }
  DiagramPoint p;
  p.label = std::move(label);
  p.mean_return = std::expm1(log_mean);
  p.std_return = std::exp(log_mean) * std::sqrt(std::expm1(log_var));
  return p;
}

DiagramPoint point_from_stats(const TerminalStats& stats, std::string label) {
  DiagramPoint p;
  p.label = std::move(label);
  p.std_return = stats.std_return;
  p.mean_return = stats.mean_return;
  p.se_std = stats.se_std;
  p.se_mean = stats.se_mean;
  return p;
}

Vector sample_pure_risky_weights(std::size_t assets, double w_max, std::uint64_t seed,
                                 std::uint32_t stream, std::uint32_t index) {
  if (assets == 0) throw Error(Errc::BadDimensions, "no assets");
  const auto m = static_cast<Eigen::Index>(assets);
  if (m == 1) return Vector::Ones(1);
  if (!(w_max > 0.5)) throw Error(Errc::BadParams, "w_max must exceed 1/2");
  const CounterRng rng(seed, stream);
  Vector w(m);
  for (std::uint32_t attempt = 0;; ++attempt) {
    double partial = 0.0;
    for (Eigen::Index i = 0; i + 1 < m; i += 2) {
      const auto u = rng.uniform_pair(index, attempt, kSetupLane + static_cast<std::uint32_t>(i / 2));
      w[i] = w_max * (2.0 * u[0] - 1.0);
      partial += w[i];
      if (i + 1 < m - 1) {
        w[i + 1] = w_max * (2.0 * u[1] - 1.0);
        partial += w[i + 1];
      }
    }
    w[m - 1] = 1.0 - partial;
    if (std::abs(w[m - 1]) <= w_max) return w;
  }
}

namespace {

std::string weights_text(const Vector& w) {
  std::string out;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (i) out += ";";
    out += format_full(w[i]);
  }
  return out;
}

DiagramPoint monte_carlo_point(const ValidatedMarket& market, double x0, const Strategy& s,
                               const SimConfig& cfg, std::string label) {
  const PathEnsemble ens = simulate_wealth(market, x0, s, cfg);
  return point_from_stats(estimate_terminal_stats(ens, x0), std::move(label));
}

}  // namespace

RegionSample sample_risky_region(const ValidatedMarket& market, double x0,
                                 std::size_t n_strategies, const SimConfig& cfg,
                                 const RiskyRegionOptions& options) {
  if (n_strategies < 1) throw Error(Errc::BadParams, "need at least one strategy");
  if (cfg.scheme != Scheme::Euler) {
    throw Error(Errc::SchemeMismatch, "pure risky strategies are simulated with the euler scheme");
  }
  RegionSample out;
  out.risk_free_return = market.risk_free_return();
  out.slope = frontier_slope(market);
  out.sampler = "risky(w_max=" + format_full(options.w_max) +
                ";segments=" + std::to_string(options.segments) + ")";
  out.config = cfg;

  const std::size_t m = market.assets();
  const double T = market.horizon();
  const double payoff = risk_free_payoff(market, x0);
  const CounterRng setup(cfg.seed, cfg.stream);
  std::uint32_t draw = 0;
  auto next_weights = [&] {
    return sample_pure_risky_weights(m, options.w_max, cfg.seed, cfg.stream, draw++);
  };

  for (std::size_t i = 0; i < n_strategies; ++i) {
    SimConfig sub = cfg;
    sub.stream = cfg.stream + 1 + static_cast<std::uint32_t>(i);
    const std::string tag = "#" + std::to_string(i);
    switch (i % 3) {
      case 0: {
        const Vector w = next_weights();
        out.points.push_back(
            constant_mix_point(market, w, "constant_mix" + tag + "(" + weights_text(w) + ")"));
        break;
      }
      case 1: {
        const std::size_t pieces = std::max<std::size_t>(1, options.segments);
        std::vector<double> bps(pieces + 1);
        std::vector<Vector> ws;
        for (std::size_t k = 0; k <= pieces; ++k) {
          bps[k] = T * static_cast<double>(k) / static_cast<double>(pieces);
        }
        bps.back() = T;
        for (std::size_t k = 0; k < pieces; ++k) ws.push_back(next_weights());
        auto curve = std::make_shared<const ParameterCurve<Vector>>(bps, std::move(ws));
        const Strategy s = Strategy::feedback(
            [curve](double t, double x) -> Vector { return (*curve)(t) * x; },
            "deterministic_mix" + tag);
        out.points.push_back(monte_carlo_point(market, x0, s, sub, s.label()));
        break;
      }
      default: {
        const Vector below = next_weights();
        const Vector above = next_weights();
        const double u = setup.uniform_pair(static_cast<std::uint32_t>(i), 0, kSetupLane - 1)[0];
        const double barrier = payoff * (0.9 + 0.3 * u);
        const Strategy s = Strategy::feedback(
            [below, above, barrier](double, double x) -> Vector {
              return (x < barrier ? below : above) * x;
            },
            "threshold_mix" + tag + "(barrier=" + format_full(barrier) + ")");
        out.points.push_back(monte_carlo_point(market, x0, s, sub, s.label()));
        break;
      }
    }
  }
  return out;
}

RegionSample sample_combination_region(const ValidatedMarket& market, double x0,
                                       const Strategy& risky,
                                       const std::vector<AlphaSpec>& alpha_specs,
                                       const SimConfig& cfg) {
  RegionSample out;
  out.risk_free_return = market.risk_free_return();
  out.slope = frontier_slope(market);
  out.sampler = "combination(" + risky.label() + ")";
  out.config = cfg;
  for (const auto& alpha : alpha_specs) {
    const Strategy s = Strategy::combination(risky, alpha);
    out.points.push_back(monte_carlo_point(market, x0, s, cfg, describe(alpha)));
  }
  return out;
}

std::vector<AlphaSpec> constant_alpha_grid(double lo, double hi, int count) {
  if (count < 1) throw Error(Errc::BadParams, "count must be >= 1");
  std::vector<AlphaSpec> out;
  for (int i = 0; i < count; ++i) {
    const double a = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    out.emplace_back(AlphaConstant{a});
  }
  return out;
}

double sharpe_standard_error(const DiagramPoint& p, double risk_free_return) {
  if (!(p.std_return > 0.0)) return 0.0;
  const double s = p.std_return;
  const double excess = p.mean_return - risk_free_return;
  const double d_mean = p.se_mean / s;
  const double d_std = excess / (s * s) * p.se_std;
  return std::sqrt(d_mean * d_mean + d_std * d_std);
}

SeparationReport check_separation(const RegionSample& sample, double confidence_k) {
  SeparationReport r;
  r.slope = sample.slope;
  r.confidence_k = confidence_k;
  for (const auto& p : sample.points) {
    const auto sharpe = sharpe_of(p, sample.risk_free_return);
    if (!sharpe) {
      ++r.excluded;
      continue;
    }
    ++r.evaluated;
    if (!r.max_sharpe || *sharpe > *r.max_sharpe) r.max_sharpe = *sharpe;
    if (*sharpe + confidence_k * sharpe_standard_error(p, sample.risk_free_return) > sample.slope) {
      ++r.flags;
      r.flagged.push_back(p.label);
    }
  }
  if (r.max_sharpe) r.gap = sample.slope - *r.max_sharpe;
  return r;
}

std::string diagram_csv(const std::vector<DiagramPoint>& points, double risk_free_return) {
  std::ostringstream out;
  out << "label,std_return,mean_return,se_std,se_mean,sharpe\n";
  for (const auto& p : points) {
    out << p.label << ',' << format_full(p.std_return) << ',' << format_full(p.mean_return) << ','
        << format_full(p.se_std) << ',' << format_full(p.se_mean) << ','
        << format_optional(sharpe_of(p, risk_free_return)) << '\n';
  }
  return out.str();
}

}  // namespace mvp

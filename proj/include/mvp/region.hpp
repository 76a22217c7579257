#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvp/diagram.hpp"
#include "mvp/simulate.hpp"

namespace mvp {

/// Points on the diagram together with the frontier line they are compared to.
struct RegionSample {
  std::vector<DiagramPoint> points;
  double risk_free_return = 0.0;
  double slope = 0.0;
  std::string sampler;
  SimConfig config;
};

struct RiskyRegionOptions {
  double w_max = 5.0;         // bound on each pure-risky weight
  std::size_t segments = 4;   // pieces of a deterministic time-varying mix
};

/// Lognormal closed form for a constant pure-risky mix w:
/// E R = e^{int w'mu} - 1, sigma_R = e^{int w'mu} sqrt(e^{int |sigma' w|^2} - 1).
DiagramPoint constant_mix_point(const ValidatedMarket& market, const Vector& weights,
                                std::string label);

DiagramPoint point_from_stats(const TerminalStats& stats, std::string label);

/// Draws a weight vector on {sum w = 1, |w_i| <= w_max} from the setup lane
/// of the counter generator; deterministic in (seed, stream, index).
Vector sample_pure_risky_weights(std::size_t assets, double w_max, std::uint64_t seed,
                                 std::uint32_t stream, std::uint32_t index);

/// Inner approximation of the dynamic risky region. Strategy i belongs to
/// family i mod 3: constant mix (closed form), deterministic time-varying
/// mix, or wealth-threshold switching mix (both by Monte Carlo, each on its
/// own substream cfg.stream + 1 + i).
RegionSample sample_risky_region(const ValidatedMarket& market, double x0,
                                 std::size_t n_strategies, const SimConfig& cfg,
                                 const RiskyRegionOptions& options = {});

/// Combinations alpha(t) pi(t) of the bond with one risky strategy. All specs
/// share the Brownian paths of `cfg`.
RegionSample sample_combination_region(const ValidatedMarket& market, double x0,
                                       const Strategy& risky,
                                       const std::vector<AlphaSpec>& alpha_specs,
                                       const SimConfig& cfg);

std::vector<AlphaSpec> constant_alpha_grid(double lo, double hi, int count);

struct SeparationReport {
  double slope = 0.0;
  double confidence_k = 0.0;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;  // riskless points, Sharpe undefined
  std::size_t flags = 0;
  std::optional<double> max_sharpe;
  std::optional<double> gap;  // slope - max_sharpe
  std::vector<std::string> flagged;
};

/// First-order delta-method standard error of the point's Sharpe ratio.
double sharpe_standard_error(const DiagramPoint& p, double risk_free_return);

/// Flags every point whose Sharpe ratio plus k standard errors exceeds the
/// frontier slope.
SeparationReport check_separation(const RegionSample& sample, double confidence_k);

/// `label,std_return,mean_return,se_std,se_mean,sharpe` rows with header.
std::string diagram_csv(const std::vector<DiagramPoint>& points, double risk_free_return);

}  // namespace mvp

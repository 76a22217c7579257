#pragma once

#include <optional>
#include <string>

namespace mvp {

/// One point on the mean / standard-deviation diagram of terminal return.
/// Standard errors are zero for closed-form points.
struct DiagramPoint {
  std::string label;
  double std_return = 0.0;
  double mean_return = 0.0;
  double se_std = 0.0;
  double se_mean = 0.0;
};

/// (mean - R_f) / std, or nothing when the point carries no risk.
std::optional<double> sharpe_of(const DiagramPoint& p, double risk_free_return);

}  // namespace mvp

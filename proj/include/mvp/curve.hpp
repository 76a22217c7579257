#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mvp/error.hpp"

namespace mvp {

/// Piecewise-constant, right-continuous function of time on [0, T].
///
/// `breakpoints` holds n+1 strictly increasing times starting at 0 and ending
/// at T; `values` holds the n per-interval constants. At an interior
/// breakpoint the right-hand interval applies; at T the last interval does.
template <class Value>
class ParameterCurve {
 public:
  ParameterCurve() = default;

  ParameterCurve(std::vector<double> breakpoints, std::vector<Value> values)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size()) {
      throw Error(Errc::BadDimensions, "curve needs n+1 breakpoints for n values (got " +
                                           std::to_string(breakpoints_.size()) + " breakpoints, " +
                                           std::to_string(values_.size()) + " values)");
    }
    if (breakpoints_.front() != 0.0) {
      throw Error(Errc::BadHorizon, "curve breakpoints must start at 0");
    }
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
      if (!(breakpoints_[i] > breakpoints_[i - 1])) {
        throw Error(Errc::BadHorizon, "curve breakpoints must be strictly increasing");
      }
    }
  }

  /// Constant curve on [0, horizon].
  static ParameterCurve constant(double horizon, Value value) {
    return ParameterCurve({0.0, horizon}, {std::move(value)});
  }

  double horizon() const { return breakpoints_.back(); }
  std::size_t intervals() const { return values_.size(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Value>& values() const { return values_; }

  /// Index of the interval containing t; t is clamped into [0, T].
  std::size_t interval_of(double t) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    if (it == breakpoints_.begin()) return 0;
    std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return std::min(idx, values_.size() - 1);
  }

  const Value& operator()(double t) const { return values_[interval_of(t)]; }

 private:
  std::vector<double> breakpoints_;
  std::vector<Value> values_;
};

}  // namespace mvp

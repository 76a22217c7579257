#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvp {

enum class Errc {
  Degenerate,
  Infeasible,
  BadDimensions,
  BadHorizon,
  OutOfHorizon,
  ReversedInterval,
  TargetBelowRiskFree,
  BadParams,
  SchemeMismatch,
  NumericalBlowup,
  DegenerateEnsemble,
  ParseError,
  SelfCheckFailed,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mvp

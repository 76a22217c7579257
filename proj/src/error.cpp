#include "mvp/error.hpp"

namespace mvp {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::Degenerate: return "Degenerate";
    case Errc::Infeasible: return "Infeasible";
    case Errc::BadDimensions: return "BadDimensions";
    case Errc::BadHorizon: return "BadHorizon";
    case Errc::OutOfHorizon: return "OutOfHorizon";
    case Errc::ReversedInterval: return "ReversedInterval";
    case Errc::TargetBelowRiskFree: return "TargetBelowRiskFree";
    case Errc::BadParams: return "BadParams";
    case Errc::SchemeMismatch: return "SchemeMismatch";
    case Errc::NumericalBlowup: return "NumericalBlowup";
    case Errc::DegenerateEnsemble: return "DegenerateEnsemble";
    case Errc::ParseError: return "ParseError";
    case Errc::SelfCheckFailed: return "SelfCheckFailed";
  }
  return "Unknown";
}

}  // namespace mvp

#include "pulledfront/error.hpp"

namespace pf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ViolatesMonotone: return "ViolatesMonotone";
    case ErrorKind::ViolatesLinear: return "ViolatesLinear";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::NotNegative: return "NotNegative";
    case ErrorKind::BranchCut: return "BranchCut";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::TruncationDominant: return "TruncationDominant";
    case ErrorKind::Blowup: return "Blowup";
    case ErrorKind::NotSettled: return "NotSettled";
    case ErrorKind::WindowTooNoisy: return "WindowTooNoisy";
    case ErrorKind::HashMismatch: return "HashMismatch";
    case ErrorKind::SchemaVersionUnknown: return "SchemaVersionUnknown";
    case ErrorKind::DecayTooSlow: return "DecayTooSlow";
    case ErrorKind::OrderingViolated: return "OrderingViolated";
    case ErrorKind::Stiff: return "Stiff";
    case ErrorKind::PhaseJump: return "PhaseJump";
    case ErrorKind::NearZeroOnContour: return "NearZeroOnContour";
    case ErrorKind::SingularBasis: return "SingularBasis";
    case ErrorKind::SolveFailed: return "SolveFailed";
    case ErrorKind::ContourCrossesSpectrum: return "ContourCrossesSpectrum";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::CFLViolated: return "CFLViolated";
    case ErrorKind::NaNDetected: return "NaNDetected";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::PerturbationTooLarge: return "PerturbationTooLarge";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace pf

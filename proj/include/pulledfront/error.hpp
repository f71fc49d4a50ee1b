#pragma once

#include <stdexcept>
#include <string>

namespace pf {

enum class ErrorKind {
  ViolatesMonotone,
  ViolatesLinear,
  NonPositive,
  NotNegative,
  BranchCut,
  NoConvergence,
  NotMonotone,
  TruncationDominant,
  Blowup,
  NotSettled,
  WindowTooNoisy,
  HashMismatch,
  SchemaVersionUnknown,
  DecayTooSlow,
  OrderingViolated,
  Stiff,
  PhaseJump,
  NearZeroOnContour,
  SingularBasis,
  SolveFailed,
  ContourCrossesSpectrum,
  QuadratureNotConverged,
  CFLViolated,
  NaNDetected,
  WindowTooShort,
  PerturbationTooLarge,
  ConfigInvalid,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pf

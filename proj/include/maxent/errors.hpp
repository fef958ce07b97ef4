#pragma once

#include <stdexcept>
#include <string>

namespace maxent {

// Base for all toolkit errors. `code()` is a stable machine-readable tag
// (also used by the CLI for structured error output); `validation()`
// distinguishes bad input from numerical failure.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg, bool validation)
      : std::runtime_error(msg), code_(std::move(code)), validation_(validation) {}
  const std::string& code() const noexcept { return code_; }
  bool validation() const noexcept { return validation_; }

 private:
  std::string code_;
  bool validation_;
};

#define MAXENT_DEFINE_ERROR(Name, is_validation)                      \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& msg) : Error(#Name, msg, is_validation) {} \
  }

MAXENT_DEFINE_ERROR(DegenerateState, true);
MAXENT_DEFINE_ERROR(NonFiniteIntegrand, false);
MAXENT_DEFINE_ERROR(DomainError, true);
MAXENT_DEFINE_ERROR(AdmissibilityViolation, true);
MAXENT_DEFINE_ERROR(NotRealizable, false);
MAXENT_DEFINE_ERROR(MaxIterations, false);
MAXENT_DEFINE_ERROR(SingularLinearSystem, false);
MAXENT_DEFINE_ERROR(NotPositiveDefinite, true);
MAXENT_DEFINE_ERROR(OutOfBounds, true);
MAXENT_DEFINE_ERROR(NotHyperbolic, false);
MAXENT_DEFINE_ERROR(RegimeMismatch, true);
MAXENT_DEFINE_ERROR(SeriesDivergence, false);
MAXENT_DEFINE_ERROR(SingularDenominator, false);
MAXENT_DEFINE_ERROR(OffMassShell, true);
MAXENT_DEFINE_ERROR(StateConstraintViolation, true);
MAXENT_DEFINE_ERROR(RealizabilityLoss, false);

#undef MAXENT_DEFINE_ERROR

}  // namespace maxent

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fqsl {

enum class ErrorCode {
  InvalidArgument,
  InvalidOrder,
  NonConvergence,
  QuadratureFailure,
  BranchDomain,
  NonFinite,
  GridTooCoarse,
  NotHermitian,
  DetuningUnsupported,
  DegenerateState,
  StepTooSmall,
  NotPure,
  InvariantViolation,
  UnknownFigure,
  TooFewPoints,
};

std::string_view to_string(ErrorCode code) noexcept;

// All toolkit failures are reported through this type; code() identifies the
// failure class so callers (and the sweep report) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fqsl

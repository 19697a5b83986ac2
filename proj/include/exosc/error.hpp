#pragma once

#include <stdexcept>
#include <string>

namespace exosc {

enum class Errc {
  InvalidParams,
  OverflowGuard,
  OnSwitchingManifold,
  ConditionViolated,
  DomainError,
  OutOfDomain,
  MaxStepsExceeded,
  StepUnderflow,
  IntegrationFailure,
  NoReturn,
  NoConvergence,
  EmptyInput,
  EmptyWindow,
  InvalidChartPoint,
  OutsideOverlap,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Validation failures map to exit code 2, everything else is numerical.
inline bool is_validation(Errc c) {
  return c == Errc::InvalidParams || c == Errc::ConditionViolated || c == Errc::DomainError ||
         c == Errc::OutOfDomain || c == Errc::InvalidChartPoint || c == Errc::OutsideOverlap ||
         c == Errc::EmptyInput || c == Errc::EmptyWindow;
}

}  // namespace exosc

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scfo {

enum class ErrorCode {
  ZeroDenominator,
  NegativeFrequency,
  Overflow,
  ParseError,
  RatioOutOfRange,
  EmptyBand,
  UnknownAntenna,
  BandZoneMismatch,
  AlreadyQuantized,
  DesignInfeasible,
  StreamTooShort,
  ChainWasQuantized,
  TapCountNotDivisible,
  RateMismatch,
  InsufficientOverlap,
  EnvelopeRegimeViolated,
  InsufficientSamples,
  PulseTooNarrow,
  WindowTooShort,
  Infeasible,
  ConfigInvalid,
  UnknownScenario,
  FormatError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every domain failure in the library is reported through this type so that
// callers (the CLI in particular) can map it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scfo

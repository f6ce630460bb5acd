#pragma once

#include <stdexcept>
#include <string>

namespace dca {

enum class ErrorCode {
  InvalidArgument,
  DomainError,
  NotPositiveDefinite,
  RankDeficient,
  InsufficientSamples,
  NotConverged,
  InvalidFit,
  InfeasibleDegreeSequence,
  DimensionTooLarge,
  UndefinedMetric,
  ParseError,
  NonNumericCell,
  IoError,
  SimulationAborted,
};

const char* to_string(ErrorCode code) noexcept;

/// True for errors caused by bad input or configuration rather than by the
/// numerics (drives the CLI exit-code split).
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::InvalidArgument, message);
}

}  // namespace dca

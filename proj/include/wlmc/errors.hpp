/**
 * @file errors.hpp
 * @brief Error codes and the exception type shared by every wlmc module.
 */
#ifndef WLMC_ERRORS_HPP
#define WLMC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace wlmc {

enum class ErrorCode {
  InvalidArgument,
  InvalidPointCount,
  NonPositiveScale,
  SingularPoint,
  DeltaPointwise,
  MethodMismatch,
  LogarithmicSingularity,
  DegenerateCrossing,
  EmptyEnsemble,
  TooFewSamples,
  DimensionMismatch,
  ParityOdd,
  LevelOutOfRange,
  UnsupportedParameter,
  QuadratureFailure,
  DegenerateWindow,
  WindowNotFound,
  NonPositiveProjection,
  InsufficientCounts,
  AllocationFailure,
  ConfigInvalid,
  IoFailure,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::InvalidPointCount: return "invalid-point-count";
    case ErrorCode::NonPositiveScale: return "non-positive-scale";
    case ErrorCode::SingularPoint: return "singular-point";
    case ErrorCode::DeltaPointwise: return "delta-pointwise";
    case ErrorCode::MethodMismatch: return "method-mismatch";
    case ErrorCode::LogarithmicSingularity: return "logarithmic-singularity";
    case ErrorCode::DegenerateCrossing: return "degenerate-crossing";
    case ErrorCode::EmptyEnsemble: return "empty-ensemble";
    case ErrorCode::TooFewSamples: return "too-few-samples";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::ParityOdd: return "parity-odd";
    case ErrorCode::LevelOutOfRange: return "level-out-of-range";
    case ErrorCode::UnsupportedParameter: return "unsupported-parameter";
    case ErrorCode::QuadratureFailure: return "quadrature-failure";
    case ErrorCode::DegenerateWindow: return "degenerate-window";
    case ErrorCode::WindowNotFound: return "window-not-found";
    case ErrorCode::NonPositiveProjection: return "non-positive-projection";
    case ErrorCode::InsufficientCounts: return "insufficient-counts";
    case ErrorCode::AllocationFailure: return "allocation-failure";
    case ErrorCode::ConfigInvalid: return "config-invalid";
    case ErrorCode::IoFailure: return "io-failure";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const char* message) {
  if (!condition) throw Error(code, message);
}

}  // namespace detail
}  // namespace wlmc

#endif  // WLMC_ERRORS_HPP

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shiftinv {

enum class ErrorCode {
  InvalidArgument,
  SingularMatrix,
  UnsupportedDimension,
  NonFinite,
  ZeroGenerator,
  NoDecayInfo,
  TailNotAchievable,
  AliasRisk,
  EpsilonTooSmall,
  NotCompactlySupported,
  TooLarge,
  ConvergenceFailure,
  DegenerateSpan,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroGenerator: return "ZeroGenerator";
    case ErrorCode::NoDecayInfo: return "NoDecayInfo";
    case ErrorCode::TailNotAchievable: return "TailNotAchievable";
    case ErrorCode::AliasRisk: return "AliasRisk";
    case ErrorCode::EpsilonTooSmall: return "EpsilonTooSmall";
    case ErrorCode::NotCompactlySupported: return "NotCompactlySupported";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DegenerateSpan: return "DegenerateSpan";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// True for failures caused by the numerics rather than by bad input.
constexpr bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::TailNotAchievable:
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::DegenerateSpan:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shiftinv

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace airdrop {

enum class ErrorCode {
  DegenerateSites,
  OutOfBounds,
  InvalidAltitude,
  InvalidDrop,
  InvalidArgument,
  TooLarge,
  ParseError,
  InvalidTour,
  MissingPhase,
  ConfigError,
  IoError,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateSites: return "DegenerateSites";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::InvalidAltitude: return "InvalidAltitude";
    case ErrorCode::InvalidDrop: return "InvalidDrop";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidTour: return "InvalidTour";
    case ErrorCode::MissingPhase: return "MissingPhase";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code. All library errors use it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace airdrop

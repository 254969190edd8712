#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace densfda {

enum class ErrorCode {
  InvalidArgument,
  AllZero,
  NonFinite,
  GridMismatch,
  SupportMismatch,
  NotInvertible,
  BadBandwidth,
  TooFewSamples,
  OutOfSupport,
  Overflow,
  NotSymmetric,
  KTooLarge,
  EmptySample,
  NoConvergence,
  DegenerateSigma,
  RankDeficient,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; code() is stable and
// is what the CLI serializes into its error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace densfda

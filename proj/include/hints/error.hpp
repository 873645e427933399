#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hints {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonFinite,
  SingularMatrix,
  NotSymmetric,
  NotPositiveDefinite,
  NoConvergence,
  NonPositiveCoefficient,
  DomainMismatch,
  RejectionBudgetExceeded,
  GridMismatch,
  DivergedLoss,
  FormatVersionMismatch,
  CorruptChecksum,
  IoError,
  ZeroDiagonal,
  SingularSplitting,
  SizeMismatch,
  ModelMissing,
  GridIncompatible,
  NonPositiveResidual,
  ZeroImage,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace hints

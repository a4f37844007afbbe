#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sptent {

enum class ErrorCode {
  DimensionMismatch,
  GroupMismatch,
  ClosureViolation,
  NonIntegerDimension,
  IntertwinerViolation,
  LambdaNotInvariant,
  NonPositiveSchmidt,
  RegionInvalid,
  CapExceeded,
  LayerOverlap,
  NotSymmetric,
  MixedBlocks,
  IncompleteTable,
  NonPhysicalReconstruction,
  NoSuchCharge,
  ClassMismatch,
  NotChargeEigenstate,
  InvariantViolation,
  ConfigError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GroupMismatch: return "GroupMismatch";
    case ErrorCode::ClosureViolation: return "ClosureViolation";
    case ErrorCode::NonIntegerDimension: return "NonIntegerDimension";
    case ErrorCode::IntertwinerViolation: return "IntertwinerViolation";
    case ErrorCode::LambdaNotInvariant: return "LambdaNotInvariant";
    case ErrorCode::NonPositiveSchmidt: return "NonPositiveSchmidt";
    case ErrorCode::RegionInvalid: return "RegionInvalid";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::LayerOverlap: return "LayerOverlap";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::MixedBlocks: return "MixedBlocks";
    case ErrorCode::IncompleteTable: return "IncompleteTable";
    case ErrorCode::NonPhysicalReconstruction: return "NonPhysicalReconstruction";
    case ErrorCode::NoSuchCharge: return "NoSuchCharge";
    case ErrorCode::ClassMismatch: return "ClassMismatch";
    case ErrorCode::NotChargeEigenstate: return "NotChargeEigenstate";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` tells callers what went wrong.
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

}  // namespace sptent

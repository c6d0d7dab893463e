#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stentsim {

enum class ErrorCode {
  kInvalidArgument,
  kGeometryOutOfBounds,
  kMalformedHeader,
  kTruncatedPayload,
  kDimensionMismatch,
  kEmptyGraph,
  kSeedOutsideLumen,
  kUnreachable,
  kDegeneratePath,
  kOutsideVolume,
  kIndexOutOfRange,
  kCenterlineTooShort,
  kNonFiniteForce,
  kDivergence,
  kIo,
  kSchema,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stentsim

#include "stentsim/error.hpp"

namespace stentsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kGeometryOutOfBounds: return "geometry-out-of-bounds";
    case ErrorCode::kMalformedHeader: return "malformed-header";
    case ErrorCode::kTruncatedPayload: return "truncated-payload";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kEmptyGraph: return "empty-graph";
    case ErrorCode::kSeedOutsideLumen: return "seed-outside-lumen";
    case ErrorCode::kUnreachable: return "unreachable";
    case ErrorCode::kDegeneratePath: return "degenerate-path";
    case ErrorCode::kOutsideVolume: return "outside-volume";
    case ErrorCode::kIndexOutOfRange: return "index-out-of-range";
    case ErrorCode::kCenterlineTooShort: return "centerline-too-short";
    case ErrorCode::kNonFiniteForce: return "non-finite-force";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kSchema: return "schema";
  }
  return "unknown";
}

}  // namespace stentsim

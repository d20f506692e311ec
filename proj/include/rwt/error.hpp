#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rwt {

enum class ErrorCode {
  kDegenerateColumn,
  kMissingFeature,
  kSchemaMismatch,
  kNonMonotoneDepths,
  kShortProfile,
  kWindowGap,
  kTooFewProfiles,
  kEmptyData,
  kInvalidParam,
  kDimensionMismatch,
  kInvalidLayout,
  kDiverged,
  kEmptyBackground,
  kTooManyFeatures,
  kParseError,
  kUnknownFunction,
  kBadVariableIndex,
  kPoleError,
  kUnboundVariable,
  kDomainError,
  kNotFound,
  kChecksumMismatch,
  kFileNotFound,
  kIoError,
  kUsageError,
  kConstantTruth,
};

// Stable identifier used in machine-readable error records.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parser failure carrying the 0-based character offset where it was detected.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t position, const std::string& message)
      : Error(code, message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace rwt

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fontsynth {

enum class ErrorCode {
  UnreadableFont,
  EmptyFont,
  MissingGlyph,
  WordTooLong,
  EmptyMask,
  DegenerateQuad,
  TransformOutOfBounds,
  DictionaryTooSmall,
  InsufficientWordsForFont,
  MalformedTemplate,
  SchemaViolation,
  DimensionMismatch,
  TooSmall,
  EmptyBatch,
  ZeroVector,
  FamilyMismatch,
  MissingMask,
  ManifestError,
  SplitOverlap,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI, the Python module) can branch on the kind of error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fontsynth

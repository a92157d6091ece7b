#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surfmon {

enum class ErrorKind {
  InvalidArgument,
  WindowLargerThanImage,
  BackendUnavailable,
  BackendError,
  FixtureMiss,
  MalformedBackendReply,
  EmptyCalibrationSet,
  CalibrationContaminated,
  EmptyMatrix,
  DegenerateLabels,
  LengthMismatch,
  Io,
  Decode,
  Config,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace surfmon

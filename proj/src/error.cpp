#include "surfmon/error.hpp"

namespace surfmon {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::WindowLargerThanImage: return "WindowLargerThanImage";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::BackendError: return "BackendError";
    case ErrorKind::FixtureMiss: return "FixtureMiss";
    case ErrorKind::MalformedBackendReply: return "MalformedBackendReply";
    case ErrorKind::EmptyCalibrationSet: return "EmptyCalibrationSet";
    case ErrorKind::CalibrationContaminated: return "CalibrationContaminated";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Decode: return "Decode";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace surfmon

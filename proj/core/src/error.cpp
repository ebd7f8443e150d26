#include "treegibbs/error.hpp"

namespace treegibbs {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return "InvalidArgument";
    case ErrorKind::ThresholdExceeded:
      return "ThresholdExceeded";
    case ErrorKind::IterationLimit:
      return "IterationLimit";
    case ErrorKind::BracketOpen:
      return "BracketOpen";
    case ErrorKind::TruncationError:
      return "TruncationError";
    case ErrorKind::PostconditionViolation:
      return "PostconditionViolation";
  }
  return "Unknown";
}

}  // namespace treegibbs

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace treegibbs {

enum class ErrorKind {
  InvalidArgument,
  ThresholdExceeded,
  IterationLimit,
  BracketOpen,
  TruncationError,
  PostconditionViolation,
};

/// Stable machine-readable name, used in CLI output.
std::string_view error_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::InvalidArgument, what) {}
};

/// The deviation norm of Q exceeds the strong-coupling threshold eta(d, n).
struct ThresholdExceeded : Error {
  ThresholdExceeded(const std::string& what, double measured, double required)
      : Error(ErrorKind::ThresholdExceeded, what),
        measured(measured),
        required(required) {}
  double measured;
  double required;
};

struct IterationLimit : Error {
  explicit IterationLimit(const std::string& what)
      : Error(ErrorKind::IterationLimit, what) {}
};

struct BracketOpen : Error {
  BracketOpen(const std::string& what, double width)
      : Error(ErrorKind::BracketOpen, what), width(width) {}
  double width;
};

struct TruncationError : Error {
  TruncationError(const std::string& what, double tail)
      : Error(ErrorKind::TruncationError, what), tail(tail) {}
  double tail;
};

struct PostconditionViolation : Error {
  explicit PostconditionViolation(const std::string& what)
      : Error(ErrorKind::PostconditionViolation, what) {}
};

}  // namespace treegibbs

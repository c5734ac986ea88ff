#pragma once

#include <stdexcept>
#include <string>

namespace mg {

enum class ErrorKind {
  ZeroDirection,
  DegenerateLine,
  NonpositiveAperture,
  VerticalZeroMode,
  ZeroFrequency,
  InsufficientSweep,
  TruncationOverflow,
  PadTooSmall,
  NonFinite,
  NoConvergence,
  MissingConstants,
  InsufficientData,
  DegenerateNorms,
  MissingOrders,
  InvalidArgument,
  Config,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mg

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcslab {

enum class ErrorKind {
  NotIrreducible,
  DimensionMismatch,
  NotMixing,
  IterationCap,
  NoPositivePower,
  LengthMismatch,
  AlphabetTooLarge,
  InvalidPartition,
  EnumerationCapExceeded,
  NeedTwoGridPoints,
  PreconditionViolated,
  ConfigInvalid,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for every failure the library reports; `kind()`
/// drives the CLI exit code.
class LabError : public std::runtime_error {
 public:
  LabError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lcslab

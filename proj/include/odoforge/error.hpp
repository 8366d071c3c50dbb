#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace odoforge {

enum class ErrorKind {
  UnknownGenerator,
  SyntaxError,
  GroupMismatch,
  RadiusCap,
  InvalidGroup,
  NotFiniteIndex,
  StateCap,
  CoreCap,
  NestingViolation,
  PointNotInCylinder,
  IndexOneLevel,
  TransversalSearchCap,
  WindowOutsideTower,
  TranslateEscapesSpace,
  InclusionUndecided,
  ColumnSumViolation,
  SemanticError,
  InvariantViolation,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; `kind()` carries the error class
// named in the interface contracts.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace odoforge

#pragma once

#include <stdexcept>
#include <string>

namespace sphereq {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CompositeModulus : Error {
  using Error::Error;
};
struct NonPositiveDimension : Error {
  using Error::Error;
};
struct ParamMismatch : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct EmptyProduct : Error {
  using Error::Error;
};
struct BudgetExceeded : Error {
  using Error::Error;
};
struct WrongVariant : Error {
  using Error::Error;
};
struct EvenModulus : Error {
  using Error::Error;
};
struct ModulusTooSmall : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};
struct NotACollision : Error {
  using Error::Error;
};
struct TargetOutsideRange : Error {
  using Error::Error;
};
struct EqualInputs : Error {
  using Error::Error;
};
struct CycleDetected : Error {
  using Error::Error;
};
struct DanglingVertex : Error {
  using Error::Error;
};

/// Constraint violations not covered by a more specific type
/// (empty candidate sets, zero-length hash families, malformed instances).
struct InvariantViolation : Error {
  using Error::Error;
};

/// Raised by the instance-file parser; carries the offending line number.
struct SyntaxError : Error {
  SyntaxError(int line_number, const std::string& what)
      : Error("line " + std::to_string(line_number) + ": " + what), line(line_number) {}
  int line;
};

}  // namespace sphereq

#pragma once

#include <stdexcept>
#include <string>

namespace sdcbf {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid mathematical domain: empty interval, division by an interval
// containing zero, expansion point outside the domain box, ...
struct DomainError : Error {
  using Error::Error;
};

// Mismatched vector/matrix/variable-space dimensions.
struct DimensionError : Error {
  using Error::Error;
};

// An iterative enclosure failed to validate within its iteration budget,
// or a series remainder bound does not converge for the given step size.
struct ConvergenceError : Error {
  using Error::Error;
};

// The barrier's relative degree is undefined or inconsistent with the
// declared chain coefficients on the region of interest.
struct RelativeDegreeError : Error {
  using Error::Error;
};

// Shrinking the input box by the actuation bound left it empty.
struct InfeasibleInputSet : Error {
  using Error::Error;
};

// State escaped to non-finite values during integration.
struct DivergenceError : Error {
  using Error::Error;
};

// Scenario file or polynomial expression could not be parsed.
struct ParseError : Error {
  using Error::Error;
};

// A file could not be read or written.
struct IOError : Error {
  using Error::Error;
};

}  // namespace sdcbf

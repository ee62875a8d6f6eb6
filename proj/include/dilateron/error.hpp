#pragma once

#include <stdexcept>
#include <string>

namespace dilateron {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, invalid parameters, unparsable documents.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the mathematical domain failed (pole, angle out of range,
/// negative entry where a positive vector is required, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The operator handed to a dilation or extremal-vector routine is not a
/// contraction on the requested space.
class ContractionError : public Error {
 public:
  using Error::Error;
};

/// An iterative method or a quadrature failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace dilateron

#ifndef CGL_ERROR_HPP
#define CGL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cgl {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed configuration, violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Focusing data that fails the sub-threshold gate.
class AdmissibilityError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Non-finite fields, threshold exits, quadrature that misses its tolerance.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cgl

#endif  // CGL_ERROR_HPP

#pragma once

#include <stdexcept>
#include <string>

namespace hqs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied something malformed: bad dimensions, out-of-range
/// parameters, inconsistent specs.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidTruncation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A truncated Fock expansion would drop more probability mass than allowed.
class TruncationTooSmall : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A closed-form evaluator was handed a matrix without the required sparsity.
class StructureError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Eigensolver failure, step-size underflow, spectra that should be real
/// but are not.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hqs

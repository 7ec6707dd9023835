#pragma once

#include <stdexcept>
#include <string>

namespace fockgabor {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (division by an
// exact zero, evaluation at a lattice point, invalid parameters).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed to meet its own accuracy contract.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// A requested evaluation route is not available for the given inputs.
class UnsupportedMethod : public Error {
 public:
  using Error::Error;
};

// A certified precondition of the counterexample construction does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace fockgabor

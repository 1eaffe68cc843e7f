#pragma once

#include <stdexcept>
#include <string>

namespace stclt {

// Base of every error the library raises. Each subclass maps to one CLI exit
// code, see tools/stclt.cpp.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Requested q-expansion precision is too small for the operation.
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, long required)
      : Error(what + " (required precision: " + std::to_string(required) + ")"),
        required_(required) {}
  long required() const noexcept { return required_; }

 private:
  long required_;
};

// No separating Hecke combination, or eigen residuals that stay above
// threshold after escalation.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Missing inputs such as primes beyond the end of an eigenvalue table.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Combinatorial or precision blowup guards.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// An identity that must hold exactly did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace stclt

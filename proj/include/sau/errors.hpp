#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sau {

// Base class for all recoverable library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed breakpoint lists, mismatched lengths and similar shape problems.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation (a = 0, q > 1, eps <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Violated precondition on an otherwise well-formed input (non-orthonormal family,
// target not orthogonal to the family, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// A produced function exceeded the configured cell-count ceiling.
class CeilingError : public DomainError {
 public:
  CeilingError(const std::string& what, std::size_t cells, std::size_t ceiling)
      : DomainError(what), cells_(cells), ceiling_(ceiling) {}

  std::size_t cells() const noexcept { return cells_; }
  std::size_t ceiling() const noexcept { return ceiling_; }

 private:
  std::size_t cells_;
  std::size_t ceiling_;
};

// Floating-point model: a certified inequality failed its tolerance.
class ToleranceError : public Error {
 public:
  using Error::Error;
};

// Text or JSON input could not be decoded.
class ParseError : public Error {
 public:
  using Error::Error;
};

// An identity that holds by construction failed. Indicates a bug, never bad input.
class CertificateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sau

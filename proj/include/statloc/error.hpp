#pragma once

#include <stdexcept>
#include <string>

namespace statloc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Malformed or out-of-domain input (bad configuration, bad argument).
class InputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "input"; }
};

/// Configuration space too large for exact enumeration. Use sampling instead.
class CapacityError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "capacity"; }
};

/// Division by a zero weight, negative weight, or similar arithmetic domain violation.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

/// A move set proposed a configuration outside the configuration space.
class MoveError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "move"; }
};

/// Inconsistent experiment description (causality, geometry mismatch, parse failure).
class SpecError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "spec"; }
};

/// Every configuration has weight zero, so no distribution exists.
class DegenerateModelError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate"; }
};

}  // namespace statloc

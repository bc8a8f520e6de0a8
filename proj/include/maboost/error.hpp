#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace maboost {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside a potential's domain (e.g. a negative weight under entropy).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input that is in-domain but carries no usable information, such as an
/// all-zero vector handed to the entropic normalization.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Infeasible constraint set or inconsistent booster configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an API precondition (length mismatch, empty ensemble).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// The weak learner returned a zero edge before any round completed.
class NoWeakLearnabilityError : public Error {
 public:
  using Error::Error;
};

/// A per-round training-error bound failed. The bounds are theorems, so this
/// always indicates a defect rather than bad data.
class BoundViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace maboost

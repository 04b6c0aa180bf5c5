#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mobind {

/// Base for all recoverable errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Errors tied to one input record. line() is 1-based, 0 when unknown.
class RecordError : public Error {
 public:
  RecordError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Malformed syntax or a value of the wrong type.
class ParseError : public RecordError {
 public:
  using RecordError::RecordError;
};

/// A required field is missing.
class SchemaError : public RecordError {
 public:
  using RecordError::RecordError;
};

/// Well-formed but semantically invalid (negative citations, bad year...).
class ValidationError : public RecordError {
 public:
  using RecordError::RecordError;
};

/// Invalid settings: bad window, cyclic alias chain, top_k <= 0, infeasible scenario.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The data does not support the requested computation (empty stratum,
/// no mobility events in scope, inconsistent baselines).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mobind

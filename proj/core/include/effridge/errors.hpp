#pragma once

#include <stdexcept>
#include <string>

namespace effridge {

enum class ErrorKind {
  invalid_input,
  singular_gram,
  numeric,
  at_threshold,
  infeasible_target,
  parse,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(ErrorKind::invalid_input, what) {}
};

/// The Gram matrix (or its spectrum) is numerically singular where an inverse is required.
class SingularGram : public Error {
 public:
  explicit SingularGram(const std::string& what) : Error(ErrorKind::singular_gram, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

/// Ridgeless request exactly at the interpolation threshold gamma = 1.
class AtThreshold : public Error {
 public:
  explicit AtThreshold(const std::string& what) : Error(ErrorKind::at_threshold, what) {}
};

/// Requested effective ridge is below the ridgeless limit for this gamma.
class InfeasibleTarget : public Error {
 public:
  explicit InfeasibleTarget(const std::string& what) : Error(ErrorKind::infeasible_target, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line)
      : Error(ErrorKind::parse, what), line_(line) {}

  /// 1-based line number, or 0 when not tied to a line.
  long line() const noexcept { return line_; }

 private:
  long line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Rethrows `e` as the same concrete error type with `prefix` prepended to its message.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& prefix);

}  // namespace effridge

#pragma once

#include <stdexcept>
#include <string>

namespace vofrac {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument sits on a pole of the gamma function.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A fractional order left the open interval (0,1).
class OrderRangeError : public Error {
 public:
  using Error::Error;
};

/// Growth rate of a function is not below the abscissa of the s-grid.
class AbscissaError : public Error {
 public:
  using Error::Error;
};

/// Function is not locally integrable at t = 0; it needs the regularized transform.
class SingularAtOrigin : public Error {
 public:
  using Error::Error;
};

/// Transform evaluation failed on a Talbot contour node.
class ContourError : public Error {
 public:
  using Error::Error;
};

/// A type invariant was violated by user-supplied data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed case file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, std::string field)
      : Error(format(msg, line, field)), line_(line), field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(const std::string& msg, int line, const std::string& field) {
    std::string out = "parse error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!field.empty()) out += " (field '" + field + "')";
    return out + ": " + msg;
  }

  int line_;
  std::string field_;
};

}  // namespace vofrac

#pragma once

#include <stdexcept>
#include <string>

namespace qpn {

/// Base class for every domain error raised by the library. The CLI maps
/// these to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed network text. Carries a 1-based line and column.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A network that parsed but breaks a structural rule (cycle, dangling
/// reference, misplaced synergy, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An operation was applied where its preconditions do not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace qpn

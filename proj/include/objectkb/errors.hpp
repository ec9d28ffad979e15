#pragma once

#include <stdexcept>
#include <string>

namespace objectkb {

/// Error categories, mapped 1:1 onto CLI exit codes.
enum class ErrorKind {
  validation = 1,  // bad input data, schema or invariant violation
  io = 2,          // filesystem / parse failures
  numeric = 3,     // sizing or numeric failures (too few points, degenerate data)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

}  // namespace objectkb

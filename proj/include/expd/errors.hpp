#pragma once

#include <stdexcept>
#include <string>

namespace expd {

// Base for all library errors. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range input (indices, files, expressions).
class InputError : public Error {
 public:
  using Error::Error;
};

// A configured size or cell budget would be exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// A numeric parameter lies outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A relation does not have the shape a family-specific routine expects
// (non-contiguous interval fibers, non-rectangular fibers, bad twists).
class FamilyError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public InputError {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : InputError(msg + " at line " + std::to_string(line) + ", column " +
                   std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace expd

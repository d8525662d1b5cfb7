#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quasilin {

/// Base class of every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Division by zero or another operand outside an operation's domain.
class InvalidOperand : public Error {
 public:
  using Error::Error;
};

/// Operands that live over different (non-nested) field towers.
class MixedField : public Error {
 public:
  using Error::Error;
};

class SquareRadicand : public Error {
 public:
  using Error::Error;
};

class ZeroRadicand : public Error {
 public:
  using Error::Error;
};

class NameCollision : public Error {
 public:
  using Error::Error;
};

class SplitForm : public Error {
 public:
  using Error::Error;
};

class IsotropicInput : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented parameter range.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Variable budget, exponent capacity or deadline exceeded. Never a wrong answer.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// Two independent computations of the same quantity disagreed.
class InternalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace quasilin

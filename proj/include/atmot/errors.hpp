#pragma once

#include <stdexcept>
#include <string>

namespace atmot {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, moduli or ambient groups do not match.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the mathematical input is violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed a configured size budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document; `path` addresses the offending JSON node.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace atmot

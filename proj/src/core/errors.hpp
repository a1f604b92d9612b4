#pragma once

#include <stdexcept>
#include <string>

namespace magweyl {

// Error categories map one-to-one onto the C API status codes and the CLI
// exit codes (invalid input 1, computation 2, budget 3).
enum class ErrorKind { InvalidArgument = 1, Computation = 2, Budget = 3, Io = 4, Internal = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {})
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Dotted path of the offending input ("sweep.h_list[2]"), empty when not applicable.
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message, std::string field = {})
      : Error(ErrorKind::InvalidArgument, message, std::move(field)) {}
};

class ComputationError : public Error {
 public:
  explicit ComputationError(const std::string& message, std::string field = {})
      : Error(ErrorKind::Computation, message, std::move(field)) {}
};

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& message, std::string field = {})
      : Error(ErrorKind::Budget, message, std::move(field)) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message, std::string field = {})
      : Error(ErrorKind::Io, message, std::move(field)) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& message) : Error(ErrorKind::Internal, message) {}
};

// Throws InvalidArgument naming `field` when `cond` is false.
void require(bool cond, const std::string& message, const std::string& field = {});

}  // namespace magweyl

#pragma once

#include <stdexcept>
#include <string>

namespace mfg {

// Error taxonomy shared by the library, the C API and the CLI.
// The numeric values double as process exit codes.
enum class Status : int {
  ok = 0,
  input_error = 2,
  no_convergence = 3,
  condition_error = 4,
  internal_error = 5,
};

class Error : public std::runtime_error {
 public:
  Error(Status s, const std::string& msg) : std::runtime_error(msg), status_(s) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& msg) : Error(Status::input_error, msg) {}
};

// Iteration budget exhausted; carries the last residual seen.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& msg, double residual)
      : Error(Status::no_convergence, msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

// A mathematical precondition (contractivity, barK range, ...) does not hold.
class ConditionError : public Error {
 public:
  explicit ConditionError(const std::string& msg) : Error(Status::condition_error, msg) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& msg) : Error(Status::internal_error, msg) {}
};

}  // namespace mfg

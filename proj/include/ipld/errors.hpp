#pragma once

#include <stdexcept>
#include <string>

namespace ipld {

/// Point outside the domain of a function or barrier, or a scalar argument
/// outside the range a formula is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid solver configuration or malformed problem data.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cholesky (or eigenvalue) breakdown of a matrix that must be positive definite.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative routine hit its iteration cap. `last_residual` carries the
/// stopping quantity at the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace ipld

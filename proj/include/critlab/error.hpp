#pragma once

#include <stdexcept>
#include <string>

namespace critlab {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A solver, quadrature or inversion failed to meet its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed experiment configuration. `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace critlab

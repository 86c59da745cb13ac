#pragma once

#include <stdexcept>
#include <string>

namespace skillmpc {

// Caller broke a precondition (shape mismatch, wrong snapshot type, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configuration value failed validation. `field()` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// NaN/Inf showed up where a finite value is required.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace skillmpc

namespace skillmpc {

// A file could not be read or does not follow its documented format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace skillmpc

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lls {

// Invalid argument to a model or RNG operation.
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Mathematical domain violation, e.g. a non-positive utility denominator
// or a non-positive price handed to a log transform.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Bad configuration text. Carries the 1-based line number (0 when the
// problem is not attached to a single line).
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// Market clearing could not produce a valid price.
class ClearanceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A NaN or infinity showed up during a simulation step.
class NumericError : public std::runtime_error {
public:
  NumericError(long step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

  long step() const noexcept { return step_; }

private:
  long step_;
};

// Output could not be written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace lls

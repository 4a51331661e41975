#pragma once

#include <stdexcept>
#include <string>

namespace mirrorsim {

/// Invalid device, charge, drive or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Malformed waveform or schedule.
class ScheduleError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Argument outside the domain of a physical formula (e.g. angle beyond the stop).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Time step violates the integrator's resolution bounds.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver did not converge or produced a non-finite state.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A virtual experiment could not be carried out as requested.
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mirrorsim

// bwlab: Bouc-Wen class hysteresis toolkit
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bwlab {

/// Invalid input or an analysis that cannot proceed (CLI exit code 1).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state while integrating the hysteretic ODEs.
class IntegrationError : public DomainError {
 public:
  IntegrationError(std::size_t step, const std::string& what)
      : DomainError("integration failure at step " + std::to_string(step) + ": " + what),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace bwlab

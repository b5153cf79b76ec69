#pragma once

#include <stdexcept>
#include <string>

namespace dualpor {

/// Argument outside the mathematical domain of a constitutive function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration or construction parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A single implicit step failed to converge. Callers usually retry with a smaller step.
class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// A time integration could not be completed even at the minimum step.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dualpor

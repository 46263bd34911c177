#pragma once

#include <stdexcept>
#include <string>

namespace vapordet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical quantity outside the domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Adaptive integration failed (step-size underflow, norm drift, ...).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// No point of the optimization probe grid satisfies the constraint.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace vapordet

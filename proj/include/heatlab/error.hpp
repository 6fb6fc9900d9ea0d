#pragma once

#include <stdexcept>
#include <string>

namespace heatlab {

/// Thrown when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown on internal numerical failure (should not happen for valid input).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace heatlab

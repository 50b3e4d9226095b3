#pragma once

#include <stdexcept>
#include <string>

namespace metent {

// Caller supplied a value outside an operation's documented range.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A point was outside (or, for subgradients, on the boundary of) the domain.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A construction produced something that contradicts its own invariants.
class InvariantViolation : public std::logic_error {
 public:
  explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace metent

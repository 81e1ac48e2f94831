#pragma once

#include <stdexcept>
#include <string>

namespace uot {

// Malformed measure data: negative weights, ragged or mismatched coordinates.
class InvalidMeasure : public std::invalid_argument {
 public:
  explicit InvalidMeasure(const std::string& what) : std::invalid_argument(what) {}
};

// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A finite-difference probe left the domain of the value function.
class FDDomainError : public DomainError {
 public:
  using DomainError::DomainError;
};

// The requested quantity is not defined for this entropy (e.g. gradients of non-smooth entropies).
class Unsupported : public std::logic_error {
 public:
  explicit Unsupported(const std::string& what) : std::logic_error(what) {}
};

// Unparseable entropy strings, cost strings or files.
class ParseError : public std::invalid_argument {
 public:
  explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace uot

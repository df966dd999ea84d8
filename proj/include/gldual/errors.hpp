#pragma once

#include <stdexcept>
#include <string>

namespace gldual {

// Bad user input: invalid domain/model parameters, malformed config files.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Fields or operators from incompatible grids.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// A closed-form expression was evaluated outside its domain of validity
// (e.g. the dual denominator 2*v0 - K touching zero).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative method failed to meet its contract within budget.
class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gldual

#pragma once

#include <stdexcept>
#include <string>

namespace excires {

// Malformed input documents (bad JSON, wrong matrix shape, missing sink slot).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally invalid networks (asymmetry, forbidden couplings).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Out-of-contract arguments (non-positive rates, empty grids, bad ranges).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Inputs outside a function's mathematical domain (negative time, T <= 0).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Numerical non-convergence (quadrature budget exhausted, root not bracketed).
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace excires

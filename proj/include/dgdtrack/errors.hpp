#pragma once

#include <stdexcept>
#include <string>

namespace dgdtrack {

// Invalid numeric parameter or range (step size, radius, gamma, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller broke a structural contract: dimension mismatch, disconnected
// graph handed to the mixing builder, clock/state out of sync.
class LogicError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A solve or eigendecomposition failed its quality gate.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bound was evaluated outside the range where it is asserted (t < t0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The (alpha, gamma) pair falls outside the region where the discounted
// summation constants are defined.
class TheoryDegeneracyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace dgdtrack

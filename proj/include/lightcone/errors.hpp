#pragma once

#include <stdexcept>
#include <string>

namespace lightcone {

/// Invalid argument (size mismatch, out-of-range site, unknown family, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter outside the mathematical domain of a formula (e.g. alpha <= 2).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Site separation too small for the dyadic window construction.
class DegenerateDistanceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A computation would exceed a configured cap (dense size, enumeration budget).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative numerical routine failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lightcone

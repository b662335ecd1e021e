#pragma once

#include <stdexcept>
#include <string>

namespace fj {

// Base for every error raised by the library. Subclasses map onto CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument, malformed config, violated precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite or out-of-range numeric argument.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrderError : public Error {
 public:
  using Error::Error;
};

// Omega/omega is not an integer.
class ResonanceError : public Error {
 public:
  using Error::Error;
};

// Near-singular eigenvector matrix (exceptional point or degenerate spectrum).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class DecompositionError : public Error {
 public:
  using Error::Error;
};

class WrongParityError : public Error {
 public:
  using Error::Error;
};

// Loss weaker than gain in an unbalanced stability check.
class PrerequisiteError : public Error {
 public:
  using Error::Error;
};

// Trajectories sampled on different time grids.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time)
      : Error(what), time_(time) {}

  // Time at which an amplitude first exceeded the blow-up threshold.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace fj

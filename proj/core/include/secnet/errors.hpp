#pragma once

#include <stdexcept>
#include <string>

namespace secnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A generator could not produce a graph meeting its constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The exact state space is larger than the configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A Monte Carlo procedure exceeded its work budget.
class WorkCapError : public Error {
 public:
  using Error::Error;
};

/// Reading or parsing an input file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace secnet

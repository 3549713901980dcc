#pragma once

#include <stdexcept>
#include <string>

namespace qhm {

/// Base class for every failure raised by the library. Argument validation
/// failures use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The cycle map is not a strict contraction, so no unique cyclic steady
/// state exists (e.g. lossless squeezers and no damping).
class NoUniqueSteadyState : public Error {
 public:
  using Error::Error;
};

class MaxItersExceeded : public Error {
 public:
  using Error::Error;
};

/// A covariance matrix violates the uncertainty bound det(V) >= 1.
class UnphysicalState : public Error {
 public:
  using Error::Error;
};

/// The two independent cold-bath heat computations disagree.
class LedgerInconsistent : public Error {
 public:
  using Error::Error;
};

class TrivialPhase : public Error {
 public:
  using Error::Error;
};

class ParameterOutOfDomain : public Error {
 public:
  using Error::Error;
};

}  // namespace qhm

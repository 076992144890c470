#pragma once

#include <stdexcept>
#include <string>

namespace lbr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of an analytic function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFamily : public Error {
 public:
  using Error::Error;
};

// A configuration or run request violates a stated invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class PositiveJumps : public Error {
 public:
  using Error::Error;
};

class LatticeModel : public Error {
 public:
  using Error::Error;
};

// Some grid point of a simulated field was not reached by any kept particle.
class TruncationFailure : public Error {
 public:
  using Error::Error;
};

class ParticlesNotRetained : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class TooFewSamples : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace lbr

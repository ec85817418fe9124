#pragma once

#include <stdexcept>
#include <string>

namespace qdent {

// All library failures derive from Error so callers can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: a violated invariant or precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An iterative or numerical procedure did not reach its tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

// An enumeration would exceed its configured budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Accumulated pruning exceeded the strict-mode threshold.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

// The requested computation is not defined for the given configuration.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A vector expected to be an eigenvector was not.
class MismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdent

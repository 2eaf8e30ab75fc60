#pragma once

#include <stdexcept>
#include <string>

namespace qtomo {

/// Input violates an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Data that should satisfy an identity (block sums, norms) does not.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when two independent checks disagree in a way that must never happen.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace qtomo

#pragma once

#include <stdexcept>
#include <string>

namespace ar2can {

// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unparsable input (files, flags, buffers). CLI exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// A domain invariant was violated: degenerate box, count mismatch, bad
// probabilities, non-finite cost. CLI exit code 3.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace ar2can

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ridgeless {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index outside the working dimension of a spectrum.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its domain (e.g. r_k with a zero tail).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Invalid scalar parameter (a <= 1, negative tau, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed numeric input: non-finite entries, shape mismatch, empty lists.
class InputError : public Error {
 public:
  using Error::Error;
};

/// M does not divide n in strict split mode.
class DivisibilityError : public Error {
 public:
  DivisibilityError(std::size_t n, std::size_t m, std::size_t suggested)
      : Error("M=" + std::to_string(m) + " does not divide n=" + std::to_string(n) +
              "; largest valid M' <= M is " + std::to_string(suggested)),
        suggested_(suggested) {}

  std::size_t suggested() const noexcept { return suggested_; }

 private:
  std::size_t suggested_;
};

/// A bound is undefined for the given inputs (infinite effective dimension).
class BoundUndefinedError : public Error {
 public:
  using Error::Error;
};

/// Configuration error; the message starts with the offending field path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dataset file error (I/O, parse, schema).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (non-finite results, failed decompositions).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace ridgeless

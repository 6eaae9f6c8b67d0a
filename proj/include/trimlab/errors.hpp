#pragma once

#include <stdexcept>
#include <string>

namespace trimlab {

/// Bad input: violated precondition, malformed descriptor, size mismatch.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical failure: singular solve, non-convergence, z on the spectrum.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpectralParameterOnSpectrum : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace trimlab

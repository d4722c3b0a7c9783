#pragma once

#include <stdexcept>
#include <string>

namespace gmc {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A precondition on an input was violated (bad dimensions, off-manifold
/// point, non-symmetric matrix, too-short series, ...).
struct InvalidInput : Error {
  using Error::Error;
};

/// An iterative numerical routine failed to converge.
struct NumericalFailure : Error {
  using Error::Error;
};

/// An operation requiring positive semi-definiteness met a retained
/// negative eigenvalue.
struct NotPSD : Error {
  using Error::Error;
};

/// Constraint violation of a chain state exceeded the recoverable bound.
struct DriftTooLarge : Error {
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace gmc

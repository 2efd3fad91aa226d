#pragma once

#include <stdexcept>
#include <string>

namespace qcurv {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: dimension mismatches, invalid models, broken invariants,
/// malformed files. Maps to CLI exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Operator or lattice exceeds the configured site cap.
class DimensionLimitError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Numerical failure: eigensolver non-convergence, degenerate ground state
/// where a curvature is requested, ill-conditioned joint spectra.
/// Maps to CLI exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace qcurv

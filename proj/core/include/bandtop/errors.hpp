#pragma once

#include <stdexcept>
#include <string>

namespace bandtop {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model definition or invalid input data (CLI exit code 2).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Iterative procedure failed to converge within its cap (CLI exit code 3).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A requested analysis cannot be performed on this input
/// (slice hits the degenerate locus, genericity violation, ...).
class AnalysisError : public Error {
public:
    using Error::Error;
};

/// Eigenvalue grouping fell between the merge and split tolerances.
class AmbiguityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace bandtop

#pragma once

#include <stdexcept>
#include <string>

namespace slowfast {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched vector or matrix dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Coefficient field violating the positivity floor m0.
class CoefficientFloorError : public Error {
public:
    using Error::Error;
};

/// Input outside an operation's admissible domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Violated numerical invariant: indefiniteness, lost symmetry, solver failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Contour quadrature failure: eigenvalue collision or unresolved quadrature.
class ContourError : public Error {
public:
    using Error::Error;
};

/// Iteration exhausted its budget without converging.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Equilibrium with a vanishing linearization margin.
class HyperbolicityError : public Error {
public:
    using Error::Error;
};

/// Too few usable samples for a regression.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration file or option set.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure while writing outputs.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace slowfast

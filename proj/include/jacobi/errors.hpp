#pragma once

#include <stdexcept>
#include <string>

namespace jacobi {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Gamma function evaluated at a nonpositive integer.
struct PoleError : Error {
    using Error::Error;
};

/// A series or iterative scheme hit its term cap without converging.
struct NonConvergence : Error {
    using Error::Error;
};

/// Structurally invalid parameters (e.g. sigma <= 0, lambda <= 0).
struct ParameterError : Error {
    using Error::Error;
};

/// Argument outside the domain of the requested evaluation.
struct DomainError : Error {
    using Error::Error;
};

/// An integral was detected to diverge.
struct DivergenceError : Error {
    using Error::Error;
};

/// Operation is not defined in the current (alpha, beta) regime.
struct RegimeError : Error {
    using Error::Error;
};

/// A spectral-parameter lower bound required by the regime is violated.
struct GuardError : Error {
    using Error::Error;
};

/// Requested truncation/tail bound could not be achieved at the term cap.
struct TruncationWarning : Error {
    using Error::Error;
};

/// Invalid command-line or run configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Monte Carlo horizon too short: the event-time tail indicates mass beyond T.
struct CensoringWarning : Error {
    using Error::Error;
};

} // namespace jacobi

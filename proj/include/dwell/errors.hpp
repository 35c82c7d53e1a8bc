#pragma once

#include <stdexcept>
#include <string>

namespace dwell {

// Root of every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A constructor or operation precondition was violated.
struct InvalidParameter : Error { using Error::Error; };
// Argument outside the domain where a function is defined (e.g. z outside [0, L]).
struct DomainError : Error { using Error::Error; };
// Pulse/medium variant not handled by the requested engine.
struct UnsupportedVariant : Error { using Error::Error; };
// Quadrature or grid refinement failed to meet its tolerance.
struct NumericError : Error { using Error::Error; };
// A conditional quantity was requested with a zero-probability condition.
struct UndefinedConditional : Error { using Error::Error; };
// Brute-force oracle would exceed its work budget.
struct OracleBudget : Error { using Error::Error; };
// Time integration did not reach its tail tolerance.
struct NonConvergence : Error { using Error::Error; };
// Malformed scenario or sweep file.
struct ConfigError : Error { using Error::Error; };

}  // namespace dwell

#pragma once

#include <stdexcept>
#include <string>

namespace wtrom {

// Base class for all library errors. CLI maps these onto exit codes:
// usage errors are caught by the argument parser, ValidationError and
// ParseError exit 2, everything else derived from Error exits 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed-form fault expression hit a denominator below the degeneracy
// threshold (all grid branches plus fault impedance summing to ~zero).
struct DivisionDegenerate : Error {
    using Error::Error;
};

// Fault kind not handled by the requested operation.
struct UnsupportedKind : Error {
    using Error::Error;
};

// Coupled sequence-network system is rank deficient.
struct SingularNetwork : Error {
    using Error::Error;
};

// |M_eq| fell below threshold while evaluating swing coefficients.
struct SingularInertia : Error {
    using Error::Error;
};

// Iteration failed to reach tolerance within the iteration budget.
struct NoConvergence : Error {
    NoConvergence(const std::string& what, int iterations)
        : Error(what), iterations(iterations) {}
    int iterations;
};

// Bisection window endpoints do not straddle the stability boundary.
struct BracketInvalid : Error {
    using Error::Error;
};

// Sweep parameter path does not name a numeric scenario field.
struct UnknownParameter : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& what, int line, std::string field = {})
        : Error(what), line(line), field(std::move(field)) {}
    int line;
    std::string field;
};

struct ValidationError : Error {
    ValidationError(const std::string& what, std::string invariant)
        : Error(what), invariant(std::move(invariant)) {}
    std::string invariant;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace wtrom

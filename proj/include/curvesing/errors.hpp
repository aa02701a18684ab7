#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvesing {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivisionByZero : Error {
    DivisionByZero() : Error("division by zero in Q(i)") {}
};

// A stated precondition was violated by the caller.
struct PreconditionError : Error {
    using Error::Error;
};

// A coefficient beyond the known precision of a truncated series was
// requested.  Truncated arithmetic never reports unknown tails as zero.
struct PrecisionError : Error {
    using Error::Error;
};

struct CompositionOrderError : Error {
    CompositionOrderError() : Error("composition requires the inner series to have positive order") {}
};

struct OrderNotDivisible : Error {
    OrderNotDivisible() : Error("series order is not divisible by the root index") {}
};

// The working precision was insufficient to decide a quantity; callers may
// retry with a larger precision.
struct PrecisionExhausted : Error {
    using Error::Error;
};

struct NotFinitelyDetermined : Error {
    using Error::Error;
};

// Normal-form reduction could not complete over Q(i); see the elimination
// routine for the cases in which this is reported.
struct EliminationStuck : Error {
    using Error::Error;
};

struct NonPolynomialInput : Error {
    NonPolynomialInput() : Error("operation requires branches with polynomial entries") {}
};

struct SameBranch : Error {
    SameBranch() : Error("branches coincide; intersection multiplicity is not finite") {}
};

struct TooManyBranches : Error {
    TooManyBranches() : Error("curve has more branches than the exhaustive matcher supports") {}
};

struct UnsupportedSmoothBranches : Error {
    UnsupportedSmoothBranches() : Error("decision requires a singular branch; smooth branches are unsupported") {}
};

struct UnsupportedMultiBranch : Error {
    UnsupportedMultiBranch() : Error("decision is implemented for single-branch curves only") {}
};

// A randomized refutation sweep found a counterexample that contradicts the
// expected structure of the rigidity constraint's solution set.
struct RefutationFailure : Error {
    using Error::Error;
};

// Textual input could not be parsed; carries a position when known.
struct ParseError : Error {
    std::size_t line = 0;
    std::size_t column = 0;
    std::string path;
    explicit ParseError(const std::string& msg) : Error(msg) {}
    ParseError(const std::string& msg, std::size_t ln, std::size_t col)
        : Error(msg + " (line " + std::to_string(ln) + ", column " + std::to_string(col) + ")"),
          line(ln), column(col) {}
    ParseError(const std::string& msg, std::string where)
        : Error(msg + " (at " + where + ")"), path(std::move(where)) {}
};

// Structurally valid input that violates a semantic rule of the file format.
struct ValidationError : Error {
    std::string path;
    explicit ValidationError(const std::string& msg) : Error(msg) {}
    ValidationError(const std::string& msg, std::string where)
        : Error(msg + " (at " + where + ")"), path(std::move(where)) {}
};

} // namespace curvesing

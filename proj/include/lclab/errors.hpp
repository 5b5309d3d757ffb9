#pragma once

#include <stdexcept>
#include <string>

namespace lclab {

// All library failures derive from Error so callers can distinguish
// laboratory failures from genuine std exceptions.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input outside the mathematical domain of an operation (bad curvature bound,
// antipodal log, negative radius, ...).
struct DomainError : Error {
    using Error::Error;
};

// A computation lost enough accuracy that its result would be meaningless
// (degenerate stencil, vanishing denominator, non-finite intermediate).
struct NumericalDegeneracy : Error {
    using Error::Error;
};

// Two supporting balls whose centers coincide; no lens can be formed.
struct DegenerateLens : Error {
    using Error::Error;
};

// A deformed surface stopped being a radial graph over its grid.
struct GraphFailure : Error {
    using Error::Error;
};

// A 1-d solve could not bracket a root.
struct NoBracket : Error {
    using Error::Error;
};

// No node is strictly above the curvature bound: the body is (numerically)
// the extremal ball, and strictness-based constructions do not apply.
struct NoStrictPoint : Error {
    using Error::Error;
};

// A pipeline step received a body recognized as the extremal ball.
struct TrivialBody : Error {
    using Error::Error;
};

// A proposed deformation left the admissible class (some principal curvature
// dropped below lambda - tol).
struct ConvexityExit : Error {
    using Error::Error;
};

// An enclosure certificate failed: the candidate ball does not strictly
// contain what it must.
struct MarginViolation : Error {
    using Error::Error;
};

}  // namespace lclab

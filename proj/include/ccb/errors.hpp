#pragma once

#include <stdexcept>
#include <string>

namespace ccb {

// Base for everything thrown by the library. The CLI maps subclasses to exit
// codes: ConfigError -> 2, OracleFailure -> 4, everything else (invariant
// violations included) -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-supplied configuration or parameters.
struct ConfigError : Error {
    using Error::Error;
};

// Point not strictly inside the body (a barrier log argument is <= 0).
struct NotInterior : Error {
    using Error::Error;
};

// Symmetric factorization failed or an eigenvalue fell below the floor.
struct NotPositiveDefinite : Error {
    using Error::Error;
};

// Damped Newton hit its iteration cap before reaching tolerance.
struct NoConvergence : Error {
    using Error::Error;
};

// A body was constructed with no certifiable interior.
struct DegenerateBody : Error {
    using Error::Error;
};

// propose/feed alternation violated.
struct PendingQuery : Error {
    using Error::Error;
};

// Context coordinate outside [0,1].
struct OutOfCube : Error {
    using Error::Error;
};

// Point not inside the closed cell it was claimed to be in.
struct NotInCell : Error {
    using Error::Error;
};

// FixedSequence context process ran out of elements.
struct ExhaustedSequence : Error {
    using Error::Error;
};

// A minimizer oracle failed to reach verified stationarity.
struct OracleFailure : Error {
    using Error::Error;
};

// Sampled certification of declared loss constants found a witness, or the
// construction-time admissibility inequalities were violated.
struct CertificationFailed : Error {
    using Error::Error;
};

// rate_fit got fewer than 3 points, duplicate horizons, or nonpositive regret.
struct DegenerateFit : Error {
    using Error::Error;
};

// A logged query point failed the harness body-membership audit.
struct FeasibilityViolation : Error {
    using Error::Error;
};

} // namespace ccb

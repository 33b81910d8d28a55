#pragma once

#include <stdexcept>
#include <string>

namespace ascal {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad construction arguments: grid sizes, coupling parameters, solver settings.
struct ValidationError : Error {
    using Error::Error;
};

// Mathematically out-of-domain request (negative time for the semigroup,
// q < 1 norms, negative-order multiplier on a field with nonzero mean, ...).
struct DomainError : Error {
    using Error::Error;
};

// Spectral data fed to a real-field synthesis is not Hermitian-symmetric.
struct SymmetryViolationError : Error {
    using Error::Error;
};

// Requested evaluation times leave the box-size window in which the periodic
// run is a faithful surrogate of the whole-space problem.
struct WindowError : Error {
    using Error::Error;
};

// Config file problems; carries a 1-based line number when one is known.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what, long line = -1)
        : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_number(line) {}
    long line_number;
};

// The numerical solution left the trusted regime (non-finite values or
// sup-norm growth beyond the configured factor).
struct BlowupError : Error {
    BlowupError(const std::string& what, double t) : Error(what), time(t) {}
    double time;
};

// Advective stability guard tripped: dt * max|u| * max|k| went above the
// configured constant. The caller is expected to halve dt and retry.
struct StepRejection : Error {
    StepRejection(const std::string& what, double product) : Error(what), guard_product(product) {}
    double guard_product;
};

// Malformed binary snapshot (bad magic, truncation, unsupported rank).
struct FormatError : Error {
    using Error::Error;
};

}  // namespace ascal

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace aclab {

/// Base class for every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the inputs was violated (bad spec, grid too coarse, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Raised when a state leaves the domain where an operation is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Shooting detected the generating curve touching the cone or the axis again.
class CrossingError : public Error {
public:
    CrossingError(const std::string& what, double arclength)
        : Error(what), arclength_(arclength) {}
    double arclength() const noexcept { return arclength_; }

private:
    double arclength_;
};

/// An iterative solve (Newton, eigen-iteration) did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A linear system was numerically singular.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// A pipeline stage failed; artifacts written before the failure are kept.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& diagnostics)
        : Error("stage " + stage + " failed: " + diagnostics), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace aclab

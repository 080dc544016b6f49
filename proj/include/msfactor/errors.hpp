#pragma once

#include <stdexcept>
#include <string>

namespace msfactor {

// Shape/dimension mismatch between operands.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input required to be Hermitian is not; nothing is symmetrized silently.
struct NotHermitianError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A documented precondition of an operation was violated by the caller.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Iterative scheme failed to reach the requested tolerance.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what, double achieved = -1.0)
        : std::runtime_error(what), achieved_error(achieved) {}
    double achieved_error;
};

// Operands tagged with different bases were combined.
struct BasisMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent run configuration; message names the field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace msfactor

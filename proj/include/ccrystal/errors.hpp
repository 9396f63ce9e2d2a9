#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccrystal {

// Bad input: a precondition of an operation was violated by the caller.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical safeguard tripped while computing a result.
class NumericalGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two successive refinements (truncation, step size) disagree.
class ConvergenceError : public NumericalGuardError {
public:
    ConvergenceError(const std::string& what, double coarse, double fine)
        : NumericalGuardError(what), coarse_(coarse), fine_(fine) {}

    double coarse() const { return coarse_; }
    double fine() const { return fine_; }

private:
    double coarse_;
    double fine_;
};

// A seed function vanishes (or nearly so) at a grid point.
class SingularityError : public NumericalGuardError {
public:
    SingularityError(const std::string& what, std::size_t index, double x)
        : NumericalGuardError(what), index_(index), x_(x) {}

    std::size_t index() const { return index_; }
    double x() const { return x_; }

private:
    std::size_t index_;
    double x_;
};

// The wave packet reached the edge of the periodic domain.
class BoundaryGuardError : public NumericalGuardError {
public:
    using NumericalGuardError::NumericalGuardError;
};

} // namespace ccrystal

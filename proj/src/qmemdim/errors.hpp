#ifndef QMEMDIM_ERRORS_HPP
#define QMEMDIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qmemdim {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition (bad fidelity, malformed state, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Requested problem exceeds a configured size budget (state count, matrix entries).
class CapacityError : public Error {
public:
    using Error::Error;
};

// Iterative solver hit its iteration budget before reaching tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, long iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual) {}

    long iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    long iterations_;
    double residual_;
};

} // namespace qmemdim

#endif

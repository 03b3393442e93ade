#pragma once

#include <stdexcept>
#include <string>

namespace vofc {

// Invalid user-supplied parameters: constructor invariants, preconditions.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Base for failures of a numerical procedure on otherwise valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Evaluation at a pole or on the branch cut (negative real axis).
class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Inversion contour does not enclose a singularity it must enclose.
class ContourError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// No admissible (r, rho, L) for the requested weight tolerance.
class InfeasiblePlan : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(std::size_t step, double residual, const std::string& what)
        : NumericalError(what), step_(step), residual_(residual) {}

    std::size_t step() const noexcept { return step_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t step_;
    double residual_;
};

}  // namespace vofc

#pragma once

#include <stdexcept>
#include <string>

namespace monoblock {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mesh dimensions leave no interior line.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Two grids (or a grid and a system) live on different meshes.
class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

/// A user evaluator produced a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

class ZeroPivotError : public Error {
public:
    using Error::Error;
};

/// Iterative solve stopped at its iteration cap.
class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& what, double final_residual)
        : Error(what), final_residual_(final_residual) {}
    double final_residual() const noexcept { return final_residual_; }

private:
    double final_residual_;
};

/// Input violates a documented precondition (bad model, bad initial pair, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Gauss-Seidel sweep direction not justified by the convection sign.
class DirectionError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// Upper/lower sequences lost their ordering; usually a wrong c bound.
class MonotonicityViolation : public Error {
public:
    using Error::Error;
};

/// Jacobi/Gauss-Seidel lockstep ordering broken.
class SandwichViolation : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

} // namespace monoblock

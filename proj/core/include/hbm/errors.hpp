#pragma once

#include <stdexcept>
#include <string>

namespace hbm {

/// Base class for rejected input data (bodies, functions, option values).
struct InvalidInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Support function fails the positivity requirement (origin not interior).
struct NotPositiveError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

/// Tangential Hessian D^2 h fails positive definiteness somewhere.
struct NotConvexError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

/// Operation requires an origin-symmetric body and the input is not.
struct NotSymmetricError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

/// Mismatched ambient dimensions, domains, or tuple arities.
struct DimensionError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

/// An iterative numerical procedure failed to converge.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iteration budget exhausted before reaching the requested tolerance.
struct MaxIterError : SolverError {
  using SolverError::SolverError;
};

/// Newton iteration stagnated or ran out its budget away from a solution.
struct NewtonDivergedError : SolverError {
  using SolverError::SolverError;
};

/// Every damped Newton step left the cone of support functions.
struct NotConvexDuringIterationError : SolverError {
  using SolverError::SolverError;
};

}  // namespace hbm

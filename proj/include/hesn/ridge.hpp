#pragma once

#include "hesn/linalg.hpp"

namespace hesn {

/// Tikhonov-regularized least squares.
///
/// Returns W (targets.cols() x features.cols()) minimizing
/// |features * W^T - targets|^2 + lambda * |W|^2, solved through the normal
/// equations (X^T X + lambda I) W^T = X^T Y with a Cholesky factorization.
/// Fewer rows than columns is allowed but logged as a warning.
///
/// Throws DimensionError on row mismatch, ArgumentError for negative or
/// non-finite lambda, SingularityError when the system cannot be factored
/// (with lambda = 0 the message advises a positive lambda).
Matrix ridge_solve(const Matrix& features, const Matrix& targets, double lambda);

} // namespace hesn

#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "hesn/linalg.hpp"

namespace hesn {

/// All eigenvalues of a real square matrix.
///
/// The matrix is balanced, reduced to upper Hessenberg form by stabilized
/// elementary similarity transforms, then deflated with Francis double-shift
/// QR sweeps. `tol` is the relative sub-diagonal deflation threshold (clamped
/// to machine epsilon from below); `max_sweeps` bounds the QR sweeps spent on
/// any single eigenvalue or pair. Complex eigenvalues come in conjugate pairs.
///
/// Throws DimensionError for non-square or empty input, ArgumentError for
/// non-finite entries, and ConvergenceError (carrying the largest modulus
/// found so far) when a sweep budget runs out.
std::vector<std::complex<double>> eigenvalues(
    const Matrix& m, double tol = std::numeric_limits<double>::epsilon(),
    std::size_t max_sweeps = 60);

/// Spectral radius max |lambda_i| of a square matrix.
double spectral_radius_estimate(const Matrix& m,
                                double tol = std::numeric_limits<double>::epsilon(),
                                std::size_t max_iter = 60);

} // namespace hesn

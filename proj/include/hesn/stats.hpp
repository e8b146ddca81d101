#pragma once

#include <span>
#include <vector>

namespace hesn {

double mean(std::span<const double> values);

// Population standard deviation (divides by n).
double population_stddev(std::span<const double> values);

/// cov(a, b)^2 / (var(a) var(b)).
/// Throws DimensionError on length mismatch or length < 2, and
/// DegenerateInputError when either input has zero variance.
double squared_correlation(std::span<const double> a, std::span<const double> b);

/// Percentile with linear interpolation between order statistics:
/// position (n - 1) * q over the sorted values, q in [0, 1].
double percentile(std::vector<double> values, double q);

} // namespace hesn

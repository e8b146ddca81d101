#include "hesn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hesn/errors.hpp"

namespace hesn {

double mean(std::span<const double> values) {
    if (values.empty()) throw DimensionError("mean of an empty sequence");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double population_stddev(std::span<const double> values) {
    const double mu = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - mu) * (v - mu);
    return std::sqrt(acc / static_cast<double>(values.size()));
}

double squared_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw DimensionError("squared_correlation: need equal lengths >= 2, got " +
                             std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    const double mean_a = mean(a);
    const double mean_b = mean(b);
    double cov = 0.0;
    double var_a = 0.0;
    double var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) {
        throw DegenerateInputError("squared_correlation: input has zero variance");
    }
    const double r2 = (cov * cov) / (var_a * var_b);
    return std::clamp(r2, 0.0, 1.0);
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw DimensionError("percentile of an empty sequence");
    if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("percentile: q must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double position = q * static_cast<double>(values.size() - 1);
    const auto lower = static_cast<std::size_t>(std::floor(position));
    const std::size_t upper = std::min(lower + 1, values.size() - 1);
    const double frac = position - static_cast<double>(lower);
    return values[lower] + frac * (values[upper] - values[lower]);
}

} // namespace hesn

#pragma once

// Independent reference implementations and random generators for tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "hesn/linalg.hpp"
#include "hesn/rng.hpp"

namespace testing {

inline hesn::Matrix random_matrix(std::size_t rows, std::size_t cols, hesn::SeededRng& rng,
                                  double lo = -1.0, double hi = 1.0) {
    hesn::Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(lo, hi);
    return m;
}

inline std::vector<double> random_vector(std::size_t n, hesn::SeededRng& rng, double lo = -1.0,
                                         double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

// Solves (X'X + lambda I) w = X'y by Gaussian elimination with partial
// pivoting in extended precision.
inline std::vector<double> normal_equations(const hesn::Matrix& x, const std::vector<double>& y,
                                            double lambda) {
    const auto t = static_cast<std::size_t>(x.rows());
    const auto f = static_cast<std::size_t>(x.cols());
    std::vector<std::vector<long double>> a(f, std::vector<long double>(f + 1, 0.0L));
    for (std::size_t i = 0; i < f; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            long double s = i == j ? lambda : 0.0L;
            for (std::size_t r = 0; r < t; ++r) s += static_cast<long double>(x(r, i)) * x(r, j);
            a[i][j] = s;
        }
        long double s = 0.0L;
        for (std::size_t r = 0; r < t; ++r) s += static_cast<long double>(x(r, i)) * y[r];
        a[i][f] = s;
    }
    for (std::size_t c = 0; c < f; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < f; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
        std::swap(a[c], a[p]);
        for (std::size_t r = c + 1; r < f; ++r) {
            const long double m = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= f; ++k) a[r][k] -= m * a[c][k];
        }
    }
    std::vector<double> w(f);
    for (std::size_t i = f; i-- > 0;) {
        long double s = a[i][f];
        for (std::size_t k = i + 1; k < f; ++k) s -= a[i][k] * w[k];
        w[i] = static_cast<double>(s / a[i][i]);
    }
    return w;
}

// |X_k| for k = 0..n/2 by the defining sum.
inline std::vector<double> naive_dft_magnitude(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> out(n / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::complex<long double> acc = 0.0L;
        for (std::size_t j = 0; j < n; ++j) {
            const long double angle = -2.0L * std::numbers::pi_v<long double> *
                                      static_cast<long double>((j * k) % n) / n;
            acc += std::polar<long double>(x[j], angle);
        }
        out[k] = static_cast<double>(std::abs(acc));
    }
    return out;
}

inline double relative_error(const std::vector<double>& got, const std::vector<double>& want) {
    long double num = 0.0L, den = 0.0L;
    for (std::size_t i = 0; i < want.size(); ++i) {
        num += (got[i] - want[i]) * static_cast<long double>(got[i] - want[i]);
        den += want[i] * static_cast<long double>(want[i]);
    }
    return static_cast<double>(std::sqrt(num / den));
}

} // namespace testing

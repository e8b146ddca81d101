#include "hesn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hesn/errors.hpp"

namespace hesn {

namespace {

double with_sign(double magnitude, double sign_of) {
    return sign_of >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Parlett-Reinsch balancing with powers of two, so no rounding is introduced.
void balance(Matrix& a) {
    const auto n = a.rows();
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                a.row(i) *= g;
                a.col(i) *= f;
            }
        }
    }
}

// Reduction to upper Hessenberg form by Gaussian elimination with pivoting.
void to_hessenberg(Matrix& a) {
    const auto n = a.rows();
    for (Eigen::Index m = 1; m + 1 < n; ++m) {
        double x = 0.0;
        Eigen::Index pivot = m;
        for (Eigen::Index j = m; j < n; ++j) {
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                pivot = j;
            }
        }
        if (pivot != m) {
            for (Eigen::Index j = m - 1; j < n; ++j) std::swap(a(pivot, j), a(m, j));
            for (Eigen::Index j = 0; j < n; ++j) std::swap(a(j, pivot), a(j, m));
        }
        if (x == 0.0) continue;
        for (Eigen::Index i = m + 1; i < n; ++i) {
            double y = a(i, m - 1);
            if (y == 0.0) continue;
            y /= x;
            a(i, m - 1) = 0.0;
            for (Eigen::Index j = m; j < n; ++j) a(i, j) -= y * a(m, j);
            for (Eigen::Index j = 0; j < n; ++j) a(j, m) += y * a(j, i);
        }
    }
}

double max_modulus(const std::vector<std::complex<double>>& values) {
    double best = 0.0;
    for (const auto& v : values) best = std::max(best, std::abs(v));
    return best;
}

// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
std::vector<std::complex<double>> hessenberg_qr(Matrix& a, double eps,
                                                std::size_t max_sweeps) {
    const auto n = static_cast<int>(a.rows());
    std::vector<std::complex<double>> found;
    found.reserve(static_cast<std::size_t>(n));

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

    int nn = n - 1;
    double t = 0.0;  // accumulated exceptional shifts
    while (nn >= 0) {
        std::size_t its = 0;
        int l = 0;
        do {
            // Look for a negligible sub-diagonal element to split the matrix.
            for (l = nn; l > 0; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                found.emplace_back(x + t, 0.0);
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    // Trailing 2x2 block.
                    const double p = 0.5 * (y - x);
                    const double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + with_sign(z, p);
                        const double first = x + z;
                        const double second = z != 0.0 ? x - w / z : first;
                        found.emplace_back(first, 0.0);
                        found.emplace_back(second, 0.0);
                    } else {
                        found.emplace_back(x + p, z);
                        found.emplace_back(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if (its == max_sweeps) {
                        throw ConvergenceError(
                            "eigenvalue QR iteration did not converge within " +
                                std::to_string(max_sweeps) + " sweeps",
                            max_modulus(found));
                    }
                    if (its > 0 && its % 10 == 0) {
                        // Exceptional shift to break cycles.
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;

                    int m = nn - 2;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        double s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                                        std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m; i < nn - 1; ++i) {
                        a(i + 2, i) = 0.0;
                        if (i != m) a(i + 2, i - 1) = 0.0;
                    }
                    for (int k = m; k < nn; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = a(k + 2, k - 1);
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = with_sign(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            p = a(k, j) + q * a(k + 1, j);
                            if (k + 1 != nn) {
                                p += r * a(k + 2, j);
                                a(k + 2, j) -= p * z;
                            }
                            a(k + 1, j) -= p * y;
                            a(k, j) -= p * x;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            p = x * a(i, k) + y * a(i, k + 1);
                            if (k + 1 != nn) {
                                p += z * a(i, k + 2);
                                a(i, k + 2) -= p * r;
                            }
                            a(i, k + 1) -= p * q;
                            a(i, k) -= p;
                        }
                    }
                }
            }
        } while (nn >= 0 && l + 1 < nn);
    }
    return found;
}

} // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& m, double tol,
                                              std::size_t max_sweeps) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw DimensionError("eigenvalues: matrix must be square and non-empty, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) throw ArgumentError("eigenvalues: matrix has non-finite entries");
    if (max_sweeps == 0) throw ArgumentError("eigenvalues: max_sweeps must be >= 1");
    if (!(tol > 0.0)) throw ArgumentError("eigenvalues: tol must be > 0");

    Matrix work = m;
    balance(work);
    to_hessenberg(work);
    return hessenberg_qr(work, std::max(tol, std::numeric_limits<double>::epsilon()),
                         max_sweeps);
}

double spectral_radius_estimate(const Matrix& m, double tol, std::size_t max_iter) {
    return max_modulus(eigenvalues(m, tol, max_iter));
}

} // namespace hesn

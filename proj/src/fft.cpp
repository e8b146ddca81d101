#include "hesn/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "hesn/errors.hpp"

namespace hesn {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) {
        throw ArgumentError("fft: length " + std::to_string(n) + " is not a power of two");
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                // Twiddles evaluated directly rather than by recurrence to keep
                // rounding error flat across long transforms.
                const std::complex<double> w = std::polar(1.0, angle * static_cast<double>(k));
                const std::complex<double> odd = w * data[start + k + half];
                data[start + k + half] = data[start + k] - odd;
                data[start + k] += odd;
            }
        }
    }
}

std::vector<double> fft_magnitude(std::span<const double> signal, std::size_t n) {
    if (n < 2 || !is_power_of_two(n)) {
        throw ArgumentError("fft_magnitude: n = " + std::to_string(n) +
                            " must be a power of two >= 2");
    }
    std::vector<std::complex<double>> buffer(n);
    const std::size_t used = std::min(n, signal.size());
    for (std::size_t i = 0; i < used; ++i) buffer[i] = signal[i];
    fft_inplace(buffer);

    std::vector<double> magnitude(n / 2 + 1);
    for (std::size_t k = 0; k < magnitude.size(); ++k) magnitude[k] = std::abs(buffer[k]);
    return magnitude;
}

} // namespace hesn

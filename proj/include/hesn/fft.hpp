#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hesn {

bool is_power_of_two(std::size_t n) noexcept;

// In-place iterative radix-2 decimation-in-time transform (unnormalized,
// e^{-2 pi i k t / n} kernel). Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);

/// One-sided magnitude spectrum |X_k|, k = 0..n/2, of the first n samples of
/// `signal` (zero-padded when shorter). Bin k is k/n cycles per step.
/// Throws ArgumentError unless n is a power of two >= 2.
std::vector<double> fft_magnitude(std::span<const double> signal, std::size_t n);

} // namespace hesn

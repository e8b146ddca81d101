#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace hesn {

/// Seedable random source used for every draw in the library.
///
/// The engine is std::mt19937_64, whose integer output sequence is fixed by
/// the C++ standard. Real draws are derived from the top 53 bits of one
/// engine output, so they do not depend on the standard library's
/// distribution implementations either.
///
/// Single owner: copies are disabled so two consumers cannot silently replay
/// the same stream. Parallel work derives child seeds with derive_seed().
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    SeededRng(const SeededRng&) = delete;
    SeededRng& operator=(const SeededRng&) = delete;
    SeededRng(SeededRng&&) noexcept = default;
    SeededRng& operator=(SeededRng&&) noexcept = default;

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // (0, 1]
    double uniform_open_closed01() { return 1.0 - uniform01(); }

    // [a, b)
    double uniform(double a, double b);

    // Unbiased integer in [0, n). n must be > 0.
    std::size_t index(std::size_t n);

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Child seed for stream `index` of `parent`: splitmix64 finalizer applied to
/// parent ^ splitmix64(index + 1). Stable across platforms.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

} // namespace hesn

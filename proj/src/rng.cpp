#include "hesn/rng.hpp"

#include <cmath>
#include <limits>

#include "hesn/errors.hpp"

namespace hesn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

double SeededRng::uniform(double a, double b) {
    if (!(a < b)) throw ArgumentError("uniform(a, b) requires a < b");
    const double v = a + (b - a) * uniform01();
    // Rounding can land exactly on b for some (a, b); keep the half-open range.
    return v < b ? v : std::nextafter(b, a);
}

std::size_t SeededRng::index(std::size_t n) {
    if (n == 0) throw ArgumentError("index(n) requires n > 0");
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return static_cast<std::size_t>(draw % range);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return splitmix64(parent ^ splitmix64(index + 1));
}

} // namespace hesn

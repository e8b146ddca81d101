#include "hesn/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hesn {

std::size_t thread_budget() {
    if (const char* env = std::getenv("HIER_ESN_THREADS")) {
        try {
            const long value = std::stol(env);
            if (value > 0) return static_cast<std::size_t>(value);
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

} // namespace hesn

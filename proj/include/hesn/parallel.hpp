#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace hesn {

/// Worker count: HIER_ESN_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t thread_budget();

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; the first exception (by index) is rethrown after all
/// workers finish.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    if (n == 0) return;
    threads = std::clamp<std::size_t>(threads, 1, n);
    std::vector<std::exception_ptr> errors(n);
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace hesn

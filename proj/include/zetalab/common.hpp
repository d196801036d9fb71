#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace zetalab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;
inline constexpr long double kPiL = 3.14159265358979323846264338327950288L;
inline constexpr long double kTwoPiL = 6.28318530717958647692528676655900577L;
inline constexpr long double kLnPiL = 1.14472988584940017414342735135305871L;
inline constexpr long double kHalfLn2PiL = 0.918938533204672741780329736405617639861L;

// requested tolerance cannot be met by the configured evaluation ladder
class precision_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// an iteration failed to converge within its cap (signals a seed/bracket bug)
class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// a table or factorization request exceeds the configured memory/work budget
class budget_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// partition [0, n) into contiguous chunks, run fn(begin, end) on each.
// Chunking is a pure function of (n, threads), so any per-index output
// written into a preallocated buffer is identical for every thread count.
inline void parallel_for_chunks(std::size_t n, int threads,
                                const std::function<void(std::size_t, std::size_t)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (n == 0) return;
    std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (nt == 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::size_t chunk = (n + nt - 1) / nt;
    for (std::size_t k = 0; k < nt; ++k) {
        std::size_t lo = k * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

}  // namespace zetalab

// common.hpp — shared helpers: errors, hashing, deterministic parallel loops
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pamb {

// validation failure of user-supplied input (CLI maps this to exit code 1)
struct invalid_input : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// resource guard tripped (state-count cap, matrix-size cap, ...)
struct size_limit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull) {
    return fnv1a64(s.data(), s.size(), h);
}

// Runs fn(i) for i in [0, n). Work is split into fixed-size blocks so that
// any per-block accumulation is independent of the thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

unsigned default_threads();

// Fixed-order pairwise summation; result does not depend on thread count
// because callers always pass a serially assembled vector.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

}  // namespace pamb

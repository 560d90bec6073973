// point.hpp — small lattice-point helpers (points are plain vector<int>)
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pamb/common.hpp"

namespace pamb {

using Point = std::vector<int>;  // one site of Z^d

inline std::uint64_t hash_ints(const int* p, std::size_t n) {
    return fnv1a64(p, n * sizeof(int));
}

struct PointHash {
    std::size_t operator()(const Point& p) const { return hash_ints(p.data(), p.size()); }
};

inline Point negated(const Point& p) {
    Point q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = -p[i];
    return q;
}

inline bool is_zero(const Point& p) {
    for (int c : p)
        if (c != 0) return false;
    return true;
}

inline int linf_norm(const Point& p) {
    int m = 0;
    for (int c : p) m = std::max(m, c < 0 ? -c : c);
    return m;
}

// mixed-radix index of a point in the box [-L, L]^dim (row-major)
inline std::size_t box_index(const int* p, int dim, int L) {
    std::size_t idx = 0;
    std::size_t base = static_cast<std::size_t>(2 * L + 1);
    for (int a = 0; a < dim; ++a) idx = idx * base + static_cast<std::size_t>(p[a] + L);
    return idx;
}

inline std::size_t box_volume(int dim, int L) {
    std::size_t v = 1;
    for (int a = 0; a < dim; ++a) v *= static_cast<std::size_t>(2 * L + 1);
    return v;
}

// iterate the box [-L, L]^dim; fn receives the current point
template <typename Fn>
void for_each_in_box(int dim, int L, Fn&& fn) {
    Point p(static_cast<std::size_t>(dim), -L);
    while (true) {
        fn(const_cast<const Point&>(p));
        int a = dim - 1;
        while (a >= 0) {
            if (++p[static_cast<std::size_t>(a)] <= L) break;
            p[static_cast<std::size_t>(a)] = -L;
            --a;
        }
        if (a < 0) break;
    }
}

}  // namespace pamb

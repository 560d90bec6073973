// diffwalk.hpp — the differences random walk of m independent walkers:
// reduced state (m-1 offsets to a pinned walker), collision counting,
// one-jump transitions, and enumeration of the collision support in a box
#pragma once

#include <cstdint>
#include <vector>

#include "pamb/kernels.hpp"

namespace pamb {

// coords stores (m-1) blocks of dim ints; block p is walker p+1 relative to
// walker m, which is pinned at the origin of relative space
struct RelativeState {
    int m = 2;
    int dim = 1;
    std::vector<int> coords;

    int blocks() const { return m - 1; }
    const int* block(int p) const { return coords.data() + static_cast<std::size_t>(p) * static_cast<std::size_t>(dim); }
    int* block(int p) { return coords.data() + static_cast<std::size_t>(p) * static_cast<std::size_t>(dim); }

    static RelativeState origin(int m, int dim) {
        return RelativeState{m, dim, std::vector<int>(static_cast<std::size_t>((m - 1) * dim), 0)};
    }
    bool operator==(const RelativeState& o) const { return m == o.m && dim == o.dim && coords == o.coords; }
    bool operator<(const RelativeState& o) const { return coords < o.coords; }

    // packed key inside the box [-L, L]^(d(m-1)); requires all |coord| <= L
    std::uint64_t packed(int L) const { return box_index(coords.data(), (m - 1) * dim, L); }

    // the full pairwise-difference array (display/debug form of the
    // unreduced representation)
    std::vector<std::vector<int>> pairwise() const;
};

// number of coinciding pairs among the m walkers
int collision_count(const RelativeState& s);

struct TransitionList {
    std::vector<std::pair<RelativeState, double>> entries;  // distinct states
    double total = 0.0;                                     // sums to 1 within 1e-12
};

// one jump of the differences walk: each walker moves with probability
// a(0,j)/m; moving the pinned walker shifts every block by -j
TransitionList transitions(const RelativeState& s, const StepDistribution& a);

// all states in [-L, L]^(d(m-1)) with collision_count >= 1, lexicographic
std::vector<RelativeState> enumerate_support(int m, int dim, int L, std::size_t state_cap = 5'000'000);

// candidate count before materializing (used by the cap check)
std::size_t support_size_estimate(int m, int dim, int L);

}  // namespace pamb

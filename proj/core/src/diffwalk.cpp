// diffwalk.cpp
#include "pamb/diffwalk.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <unordered_set>

namespace pamb {

std::vector<std::vector<int>> RelativeState::pairwise() const {
    // differences xi_p - xi_q for 1 <= p < q <= m, reconstructed from the
    // reduced coords (xi_m pinned at 0)
    std::vector<std::vector<int>> out;
    auto abs_pos = [&](int p) -> std::vector<int> {
        if (p == m - 1) return std::vector<int>(static_cast<std::size_t>(dim), 0);
        return std::vector<int>(block(p), block(p) + dim);
    };
    for (int p = 0; p < m; ++p)
        for (int q = p + 1; q < m; ++q) {
            auto xp = abs_pos(p), xq = abs_pos(q);
            std::vector<int> diff(static_cast<std::size_t>(dim));
            for (int c = 0; c < dim; ++c) diff[static_cast<std::size_t>(c)] = xp[static_cast<std::size_t>(c)] - xq[static_cast<std::size_t>(c)];
            out.push_back(std::move(diff));
        }
    return out;
}

int collision_count(const RelativeState& s) {
    int count = 0;
    const int d = s.dim;
    for (int p = 0; p < s.blocks(); ++p) {
        bool zero = true;
        for (int c = 0; c < d; ++c)
            if (s.block(p)[c] != 0) {
                zero = false;
                break;
            }
        if (zero) ++count;  // pair (p, m)
        for (int q = p + 1; q < s.blocks(); ++q) {
            if (std::memcmp(s.block(p), s.block(q), sizeof(int) * static_cast<std::size_t>(d)) == 0) ++count;
        }
    }
    return count;
}

TransitionList transitions(const RelativeState& s, const StepDistribution& a) {
    if (a.dim() != s.dim) throw invalid_input("transitions: kernel dimension does not match state");
    std::map<std::vector<int>, double> merged;
    const double inv_m = 1.0 / s.m;
    for (const auto& step : a.support()) {
        // walkers 1..m-1: shift one block
        for (int r = 0; r < s.blocks(); ++r) {
            std::vector<int> c = s.coords;
            for (int ax = 0; ax < s.dim; ++ax)
                c[static_cast<std::size_t>(r * s.dim + ax)] += step.offset[static_cast<std::size_t>(ax)];
            merged[std::move(c)] += inv_m * step.prob;
        }
        // walker m: every block shifts by -j
        std::vector<int> c = s.coords;
        for (int r = 0; r < s.blocks(); ++r)
            for (int ax = 0; ax < s.dim; ++ax)
                c[static_cast<std::size_t>(r * s.dim + ax)] -= step.offset[static_cast<std::size_t>(ax)];
        merged[std::move(c)] += inv_m * step.prob;
    }
    TransitionList out;
    out.entries.reserve(merged.size());
    for (auto& [coords, p] : merged) {
        out.total += p;
        out.entries.push_back({RelativeState{s.m, s.dim, coords}, p});
    }
    return out;
}

std::size_t support_size_estimate(int m, int dim, int L) {
    // each of the m(m-1)/2 coincidence classes contributes V^(m-2) candidates
    std::size_t V = box_volume(dim, L);
    std::size_t per_class = 1;
    for (int i = 0; i < m - 2; ++i) {
        if (per_class > (static_cast<std::size_t>(-1) / std::max<std::size_t>(V, 1))) return static_cast<std::size_t>(-1);
        per_class *= V;
    }
    return static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2 * per_class;
}

std::vector<RelativeState> enumerate_support(int m, int dim, int L, std::size_t state_cap) {
    if (m < 2) throw invalid_input("enumerate_support: m must be >= 2");
    if (L < 0) throw invalid_input("enumerate_support: box half-width must be >= 0");
    std::size_t est = support_size_estimate(m, dim, L);
    if (est > state_cap)
        throw size_limit_error("enumerate_support: candidate count " + std::to_string(est) +
                               " exceeds state cap " + std::to_string(state_cap) +
                               " (m=" + std::to_string(m) + ", d=" + std::to_string(dim) +
                               ", L=" + std::to_string(L) + ")");
    const int blocks = m - 1;
    const int D = blocks * dim;
    std::unordered_set<std::uint64_t> seen;
    std::vector<RelativeState> out;

    auto try_add = [&](const std::vector<int>& coords) {
        if (seen.insert(box_index(coords.data(), D, L)).second)
            out.push_back(RelativeState{m, dim, coords});
    };

    // class (p, m): block p pinned at 0, the rest free
    std::vector<int> coords(static_cast<std::size_t>(D));
    for (int p = 0; p < blocks; ++p) {
        int free_axes = D - dim;
        for_each_in_box(free_axes == 0 ? 1 : free_axes, free_axes == 0 ? 0 : L, [&](const Point& v) {
            std::fill(coords.begin(), coords.end(), 0);
            int src = 0;
            for (int r = 0; r < blocks; ++r) {
                if (r == p) continue;
                for (int ax = 0; ax < dim; ++ax) coords[static_cast<std::size_t>(r * dim + ax)] = free_axes == 0 ? 0 : v[static_cast<std::size_t>(src++)];
            }
            try_add(coords);
        });
    }
    // class (p, q), q < m: blocks p and q equal, the rest free
    for (int p = 0; p < blocks; ++p)
        for (int q = p + 1; q < blocks; ++q) {
            int free_axes = D - dim;  // one shared block value + (blocks-2) free blocks
            for_each_in_box(free_axes, L, [&](const Point& v) {
                // first dim entries: the shared value of blocks p and q
                for (int ax = 0; ax < dim; ++ax) {
                    coords[static_cast<std::size_t>(p * dim + ax)] = v[static_cast<std::size_t>(ax)];
                    coords[static_cast<std::size_t>(q * dim + ax)] = v[static_cast<std::size_t>(ax)];
                }
                int src = dim;
                for (int r = 0; r < blocks; ++r) {
                    if (r == p || r == q) continue;
                    for (int ax = 0; ax < dim; ++ax) coords[static_cast<std::size_t>(r * dim + ax)] = v[static_cast<std::size_t>(src++)];
                }
                try_add(coords);
            });
        }

    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace pamb

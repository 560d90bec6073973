// walks.cpp
#include "pamb/walks.hpp"

#include <algorithm>
#include <cstring>

namespace pamb {

const int* WalkPath::position_at(double t) const {
    // index of the last jump at or before t
    std::size_t k = static_cast<std::size_t>(std::upper_bound(jump_times.begin(), jump_times.end(), t) - jump_times.begin());
    return position_after(k);
}

StepSampler::StepSampler(const StepDistribution& a) {
    double c = 0.0;
    for (const auto& s : a.support()) {
        offsets_.push_back(s.offset);
        c += s.prob;
        cum_.push_back(c);
    }
    cum_.back() = 1.0;  // absorb rounding
}

const Point& StepSampler::sample(double u) const {
    std::size_t i = static_cast<std::size_t>(std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
    if (i >= offsets_.size()) i = offsets_.size() - 1;
    return offsets_[i];
}

WalkPath simulate_walk(const StepDistribution& a, double t_max, CounterRng& rng,
                       const std::vector<int>& start, int torus) {
    const int d = a.dim();
    if (torus > 0 && torus < 2 * a.max_offset() + 1)
        throw invalid_input("simulate_walk: torus side must be >= 2 * max offset + 1");
    WalkPath p;
    p.dim = d;
    p.torus = torus;
    p.t_max = t_max;
    StepSampler sampler(a);
    std::vector<int> pos = start;
    if (torus > 0)
        for (int& c : pos) c = ((c % torus) + torus) % torus;
    p.positions.insert(p.positions.end(), pos.begin(), pos.end());
    double t = 0.0;
    while (true) {
        t += rng.next_exponential(1.0);
        if (t > t_max) break;
        const Point& step = sampler.sample(rng.next_unit());
        for (int c = 0; c < d; ++c) {
            pos[static_cast<std::size_t>(c)] += step[static_cast<std::size_t>(c)];
            if (torus > 0) pos[static_cast<std::size_t>(c)] = ((pos[static_cast<std::size_t>(c)] % torus) + torus) % torus;
        }
        p.jump_times.push_back(t);
        p.positions.insert(p.positions.end(), pos.begin(), pos.end());
    }
    return p;
}

double collision_local_time(const WalkPath& x, const WalkPath& y, double t) {
    if (x.dim != y.dim) throw invalid_input("collision_local_time: dimension mismatch");
    if (x.torus != y.torus) throw invalid_input("collision_local_time: torus mismatch");
    const int d = x.dim;
    const std::size_t bytes = sizeof(int) * static_cast<std::size_t>(d);
    std::size_t i = 0, j = 0;
    double t_cur = 0.0, total = 0.0;
    while (t_cur < t) {
        double nx = i < x.jumps() ? x.jump_times[i] : t;
        double ny = j < y.jumps() ? y.jump_times[j] : t;
        double t_next = std::min({nx, ny, t});
        if (std::memcmp(x.position_after(i), y.position_after(j), bytes) == 0) total += t_next - t_cur;
        t_cur = t_next;
        if (t_cur >= t) break;
        if (nx <= ny && i < x.jumps() && nx == t_cur) ++i;
        if (ny <= nx && j < y.jumps() && ny == t_cur) ++j;
    }
    return total;
}

}  // namespace pamb

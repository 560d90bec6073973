// mc_collision.cpp
#include "pamb/mc_collision.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "pamb/common.hpp"

namespace pamb {

namespace {

// positions of m walkers plus the pairwise coincidence pattern, updated in
// O(m) per jump
struct WalkerEnsemble {
    int m, d, torus;
    std::vector<int> pos;           // m * d
    std::vector<unsigned char> eq;  // m*m coincidence matrix (upper used)
    int sharp = 0;

    WalkerEnsemble(int m_, int d_, int torus_) : m(m_), d(d_), torus(torus_) {
        pos.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(d), 0);
        eq.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 1);
        sharp = m * (m - 1) / 2;  // all start at the origin
    }

    bool same(int k, int l) const {
        return std::memcmp(&pos[static_cast<std::size_t>(k * d)], &pos[static_cast<std::size_t>(l * d)],
                           sizeof(int) * static_cast<std::size_t>(d)) == 0;
    }

    void move(int r, const Point& step) {
        for (int c = 0; c < d; ++c) {
            int& v = pos[static_cast<std::size_t>(r * d + c)];
            v += step[static_cast<std::size_t>(c)];
            if (torus > 0) v = ((v % torus) + torus) % torus;
        }
        for (int s = 0; s < m; ++s) {
            if (s == r) continue;
            int k = std::min(s, r), l = std::max(s, r);
            unsigned char& e = eq[static_cast<std::size_t>(k * m + l)];
            unsigned char now = same(k, l) ? 1 : 0;
            if (e != now) {
                sharp += now ? 1 : -1;
                e = now;
            }
        }
    }
};

}  // namespace

CollisionRecord simulate_collisions(int m, const StepDistribution& a, double t,
                                    std::uint64_t master_seed, std::uint64_t replica, int torus) {
    if (m < 2) throw invalid_input("simulate_collisions: m must be >= 2");
    if (t < 0.0) throw invalid_input("simulate_collisions: t must be >= 0");
    CounterRng rng(master_seed, replica, kStreamMc);
    CollisionRecord rec;
    rec.m = m;
    rec.horizon = t;
    rec.replica_seed = rng.key();
    rec.pair_breakdown.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2, 0.0);
    WalkerEnsemble ens(m, a.dim(), torus);
    StepSampler sampler(a);

    auto pair_index = [m](int k, int l) { return static_cast<std::size_t>(k * (2 * m - k - 1) / 2 + (l - k - 1)); };

    double t_cur = 0.0;
    while (t_cur < t) {
        double dt = rng.next_exponential(static_cast<double>(m));
        double t_next = std::min(t_cur + dt, t);
        double hold = t_next - t_cur;
        if (ens.sharp > 0) {
            for (int k = 0; k < m; ++k)
                for (int l = k + 1; l < m; ++l)
                    if (ens.eq[static_cast<std::size_t>(k * m + l)]) rec.pair_breakdown[pair_index(k, l)] += hold;
        }
        t_cur = t_next;
        if (t_cur >= t) break;
        int r = std::min(static_cast<int>(rng.next_unit() * m), m - 1);
        ens.move(r, sampler.sample(rng.next_unit()));
    }
    rec.total = pairwise_sum(rec.pair_breakdown);
    return rec;
}

std::vector<double> collision_totals_on_grid(int m, const StepDistribution& a,
                                             const std::vector<double>& grid, CounterRng& rng,
                                             int torus) {
    if (grid.empty()) return {};
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1]) throw invalid_input("collision grid must be increasing");
    const double t_end = grid.back();
    WalkerEnsemble ens(m, a.dim(), torus);
    StepSampler sampler(a);
    std::vector<double> out(grid.size(), 0.0);
    double t_cur = 0.0, acc = 0.0;
    std::size_t g = 0;
    while (t_cur < t_end) {
        double t_next = std::min(t_cur + rng.next_exponential(static_cast<double>(m)), t_end);
        // checkpoints inside the holding interval see the same sharp
        while (g < grid.size() && grid[g] <= t_next) {
            out[g] = acc + ens.sharp * (grid[g] - t_cur);
            ++g;
        }
        acc += ens.sharp * (t_next - t_cur);
        t_cur = t_next;
        if (t_cur >= t_end) break;
        int r = std::min(static_cast<int>(rng.next_unit() * m), m - 1);
        ens.move(r, sampler.sample(rng.next_unit()));
    }
    while (g < grid.size()) out[g++] = acc;
    return out;
}

CollisionRecord collision_record_from_paths(const std::vector<WalkPath>& paths, double t) {
    const int m = static_cast<int>(paths.size());
    if (m < 2) throw invalid_input("collision_record_from_paths: need at least two paths");
    CollisionRecord rec;
    rec.m = m;
    rec.horizon = t;
    rec.pair_breakdown.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2, 0.0);
    std::size_t idx = 0;
    for (int k = 0; k < m; ++k)
        for (int l = k + 1; l < m; ++l) rec.pair_breakdown[idx++] = collision_local_time(paths[static_cast<std::size_t>(k)], paths[static_cast<std::size_t>(l)], t);
    rec.total = pairwise_sum(rec.pair_breakdown);
    return rec;
}

ExpMomentResult exp_mean_stats(std::vector<double> x) {
    ExpMomentResult r;
    r.replicas = x.size();
    if (x.empty()) return r;
    double M = *std::max_element(x.begin(), x.end());
    std::vector<double> e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = std::exp(x[i] - M);
    MeanSe st = batch_mean_se(e);
    r.log_estimate = M + std::log(st.mean);
    r.log_se = st.se / st.mean;
    std::vector<double> sorted(e);
    std::sort(sorted.begin(), sorted.end());
    std::size_t top = std::max<std::size_t>(1, sorted.size() / 100);
    double tail = 0.0, total = pairwise_sum(sorted);
    for (std::size_t i = sorted.size() - top; i < sorted.size(); ++i) tail += sorted[i];
    r.tail_share = total > 0.0 ? tail / total : 0.0;
    r.ci_ok = r.tail_share <= 0.5;
    return r;
}

ExpMomentResult exp_moment(int m, const StepDistribution& a, double b, double t,
                           std::size_t replicas, std::uint64_t seed, unsigned threads, int torus) {
    if (b < 0.0) throw invalid_input("exp_moment: b must be >= 0");
    std::vector<double> x(replicas), meanT(replicas);
    parallel_for(replicas, threads, [&](std::size_t r) {
        CollisionRecord rec = simulate_collisions(m, a, t, seed, r, torus);
        x[r] = b * rec.total;
        meanT[r] = rec.total;
    });
    ExpMomentResult res = exp_mean_stats(std::move(x));
    res.mean_T = mean_se(meanT).mean;
    res.b = b;
    res.t = t;
    if (b == 0.0) {  // exactly 1, no sampling noise
        res.log_estimate = 0.0;
        res.log_se = 0.0;
    }
    return res;
}

ChiMcResult chi_mc(int m, const StepDistribution& a, double b, const std::vector<double>& t_grid,
                   std::size_t replicas, std::uint64_t seed, unsigned threads, int torus) {
    if (t_grid.size() < 2) throw invalid_input("chi_mc: need at least two grid times");
    std::vector<std::vector<double>> T(t_grid.size(), std::vector<double>(replicas));
    parallel_for(replicas, threads, [&](std::size_t r) {
        CounterRng rng(seed, r, kStreamMc);
        auto totals = collision_totals_on_grid(m, a, t_grid, rng, torus);
        for (std::size_t g = 0; g < t_grid.size(); ++g) T[g][r] = totals[g];
    });
    ChiMcResult res;
    std::vector<double> xs, ys, ses;
    for (std::size_t g = 0; g < t_grid.size(); ++g) {
        std::vector<double> x(replicas);
        for (std::size_t r = 0; r < replicas; ++r) x[r] = b * T[g][r];
        ExpMomentResult e = exp_mean_stats(std::move(x));
        ChiMcPoint p{t_grid[g], e.log_estimate, e.log_se, e.tail_share};
        res.points.push_back(p);
        if (e.tail_share > 0.1) res.alarm = true;
        if (!e.ci_ok) res.ci_ok = false;
        xs.push_back(p.t);
        ys.push_back(p.log_estimate);
        ses.push_back(std::max(p.log_se, 1e-12));
    }
    // grid points share trajectories, so their errors are positively
    // correlated; the independent-error slope variance is conservative here
    LineFit fit = weighted_line_fit(xs, ys, ses);
    res.slope = fit.slope;
    res.slope_se = fit.slope_se * (res.alarm ? 2.0 : 1.0);
    return res;
}

ExpMomentResult quenched_exp_moment(const StepDistribution& a, double b, double t,
                                    std::uint64_t xi_seed, std::size_t replicas, std::uint64_t seed,
                                    unsigned threads, int torus) {
    CounterRng xi_rng(xi_seed, 0, kStreamXi);
    std::vector<int> origin(static_cast<std::size_t>(a.dim()), 0);
    WalkPath xi = simulate_walk(a, t, xi_rng, origin, torus);
    std::vector<double> x(replicas), meanT(replicas);
    parallel_for(replicas, threads, [&](std::size_t r) {
        CounterRng rng(seed, r, kStreamXiPrime);
        WalkPath xp = simulate_walk(a, t, rng, origin, torus);
        double T = collision_local_time(xi, xp, t);
        x[r] = b * T;
        meanT[r] = T;
    });
    ExpMomentResult res = exp_mean_stats(std::move(x));
    res.mean_T = mean_se(meanT).mean;
    res.b = b;
    res.t = t;
    if (b == 0.0) {
        res.log_estimate = 0.0;
        res.log_se = 0.0;
    }
    return res;
}

}  // namespace pamb

// mc_collision.hpp — event-driven Monte Carlo for the collision local time of
// m independent walks, and the exponential-moment estimators built on it
#pragma once

#include <cstdint>
#include <vector>

#include "pamb/stats.hpp"
#include "pamb/walks.hpp"

namespace pamb {

// stream ids (third key component) keep the independent randomness sources of
// one run from colliding
enum RngStream : std::uint64_t {
    kStreamField = 0,
    kStreamFkWalk = 1,
    kStreamDualityForward = 2,
    kStreamDualityDual = 3,
    kStreamPalmField = 4,
    kStreamPalmWalk = 5,
    kStreamZeta = 6,
    kStreamXi = 7,
    kStreamMc = 8,
    kStreamXiPrime = 9,
};

struct CollisionRecord {
    int m = 2;
    double horizon = 0.0;
    double total = 0.0;                  // T^(m)(t), time units, summed over pairs
    std::vector<double> pair_breakdown;  // T_kl in (k,l) lexicographic order
    std::uint64_t replica_seed = 0;
};

// superposed rate-m Poisson clock; the collision count is constant between
// events, so the accumulation is exact
CollisionRecord simulate_collisions(int m, const StepDistribution& a, double t,
                                    std::uint64_t master_seed, std::uint64_t replica, int torus = 0);

// T^(m) at each grid time along a single trajectory (grid must be increasing)
std::vector<double> collision_totals_on_grid(int m, const StepDistribution& a,
                                             const std::vector<double>& grid, CounterRng& rng,
                                             int torus = 0);

// exact record for externally supplied trajectories (test harnesses)
CollisionRecord collision_record_from_paths(const std::vector<WalkPath>& paths, double t);

struct ExpMomentResult {
    double log_estimate = 0.0;  // log of the sample mean of exp(b T)
    double log_se = 0.0;        // relative standard error of the mean
    double tail_share = 0.0;    // share of the estimate carried by the top 1%
    bool ci_ok = true;          // false when tail_share > 0.5
    std::size_t replicas = 0;
    double mean_T = 0.0;
    double b = 0.0;
    double t = 0.0;
};

ExpMomentResult exp_moment(int m, const StepDistribution& a, double b, double t,
                           std::size_t replicas, std::uint64_t seed, unsigned threads = 1,
                           int torus = 0);

struct ChiMcPoint {
    double t = 0.0;
    double log_estimate = 0.0;
    double log_se = 0.0;
    double tail_share = 0.0;
};

struct ChiMcResult {
    double slope = 0.0;
    double slope_se = 0.0;  // widened x2 when the heavy-tail alarm fires
    bool alarm = false;
    bool ci_ok = true;
    std::vector<ChiMcPoint> points;
};

// least-squares slope of log E exp(b T^(m)(t)) against t
ChiMcResult chi_mc(int m, const StepDistribution& a, double b, const std::vector<double>& t_grid,
                   std::size_t replicas, std::uint64_t seed, unsigned threads = 1, int torus = 0);

// xi frozen by xi_seed, xi' resampled per replica
ExpMomentResult quenched_exp_moment(const StepDistribution& a, double b, double t,
                                    std::uint64_t xi_seed, std::size_t replicas, std::uint64_t seed,
                                    unsigned threads = 1, int torus = 0);

// shared estimator core: mean of exp(x) with batch-means error, overflow-safe
ExpMomentResult exp_mean_stats(std::vector<double> x);

}  // namespace pamb

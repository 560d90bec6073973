// walks.hpp — continuous-time random walk paths (rate 1, exact event times)
#pragma once

#include <cstdint>
#include <vector>

#include "pamb/kernels.hpp"
#include "pamb/rng.hpp"

namespace pamb {

// piecewise-constant path over [0, t_max]; positions[k] is the location after
// the k-th jump (positions has jump_times.size() + 1 entries, flattened)
struct WalkPath {
    int dim = 1;
    int torus = 0;  // 0: free lattice; N > 0: positions live on (Z/NZ)^d
    double t_max = 0.0;
    std::vector<double> jump_times;
    std::vector<int> positions;

    std::size_t jumps() const { return jump_times.size(); }
    const int* position_after(std::size_t k) const { return positions.data() + k * static_cast<std::size_t>(dim); }
    // location at time t (left-continuous between jumps)
    const int* position_at(double t) const;
};

// sampler for the step law (cumulative table)
class StepSampler {
  public:
    explicit StepSampler(const StepDistribution& a);
    const Point& sample(double u) const;  // u in (0,1)

  private:
    std::vector<Point> offsets_;
    std::vector<double> cum_;
};

WalkPath simulate_walk(const StepDistribution& a, double t_max, CounterRng& rng,
                       const std::vector<int>& start, int torus = 0);

// exact collision local time of two paths up to t (positions compared on the
// torus when both paths carry one)
double collision_local_time(const WalkPath& x, const WalkPath& y, double t);

}  // namespace pamb

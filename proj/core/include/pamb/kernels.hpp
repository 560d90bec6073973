// kernels.hpp — random walk jump laws on Z^d: symmetrization, reflection,
// structure function, continuous-time transition probabilities
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pamb/point.hpp"

namespace pamb {

// finite-support jump law a(0, .) on Z^d, jump rate fixed at 1
class StepDistribution {
  public:
    struct Step {
        Point offset;
        double prob;
    };

    StepDistribution(int dim, std::vector<Step> steps);

    int dim() const { return dim_; }
    const std::vector<Step>& support() const { return steps_; }
    bool is_symmetric() const { return symmetric_; }
    bool is_irreducible() const { return irreducible_; }
    int max_offset() const { return max_offset_; }  // L-infinity radius of the support

    // probability of a given offset (0 if absent)
    double prob(const Point& offset) const;

    // variance rate per unit time along axis a: sum_j a(j) j_a^2
    double axis_variance_rate(int axis) const;

    std::uint64_t hash() const { return hash_; }
    std::string describe() const;

    // per-axis decomposition: valid when every offset moves a single axis.
    // axis a then evolves as an independent 1-d compound-Poisson walk with
    // rate rate[a] and step law steps[a] (offset -> prob, normalized).
    struct AxisWalk {
        double rate = 0.0;
        std::vector<std::pair<int, double>> steps;
    };
    const std::optional<std::vector<AxisWalk>>& axis_walks() const { return axis_walks_; }
    bool axis_aligned() const { return axis_walks_.has_value(); }

  private:
    int dim_;
    std::vector<Step> steps_;
    bool symmetric_ = false;
    bool irreducible_ = false;
    int max_offset_ = 0;
    std::uint64_t hash_ = 0;
    std::optional<std::vector<AxisWalk>> axis_walks_;
};

StepDistribution symmetrize(const StepDistribution& a);  // (a(0,j) + a(0,-j)) / 2
StepDistribution reflect(const StepDistribution& a);     // a*(0,j) = a(0,-j)

// A(lambda) = sum_j a(0,j) cos(j . lambda); rejects non-symmetric kernels
double structure_function(const StepDistribution& a, const std::vector<double>& lambda);

// built-in kernels
StepDistribution srw_kernel(int dim);               // 1/(2d) to each neighbor
StepDistribution drift_kernel(double p);            // d=1: p right, 1-p left
StepDistribution parse_kernel_config(const std::string& text);  // key-value format
StepDistribution load_kernel_file(const std::string& path);
// "srw" (needs dim), "drift:p", "file:PATH"
StepDistribution parse_kernel_spec(const std::string& spec, int dim);

// P_t(0, i) for i in the box [-L, L]^d, one time slice per requested time
struct HeatKernelTable {
    StepDistribution kernel;
    std::vector<double> times;
    int box = 0;                              // half-width per axis
    std::vector<std::vector<double>> values;  // [time][box_index(i)]
    std::vector<double> truncation_mass;      // 1 - sum of the slice, per time
    bool truncation_warning = false;          // box too small for requested accuracy

    double at(std::size_t time_idx, const Point& i) const {
        return values[time_idx][box_index(i.data(), kernel.dim(), box)];
    }
};

struct HeatKernelOptions {
    int quad_nodes_per_axis = 64;   // tensor Gauss–Legendre resolution (scaled up with box)
    double warn_mass = 1e-8;        // flag slices leaking more than this
};

// Fourier evaluation of P_t via the structure function; symmetric kernels only.
HeatKernelTable heat_kernel(const StepDistribution& a, const std::vector<double>& times, int box,
                            const HeatKernelOptions& opt = {});
inline HeatKernelTable heat_kernel(const StepDistribution& a, double t, int box,
                                   const HeatKernelOptions& opt = {}) {
    return heat_kernel(a, std::vector<double>{t}, box, opt);
}

// 1-d table q_t(k), |k| <= kmax, for a symmetric 1-d step law with jump rate
// `rate` (building block of the per-axis product representation)
std::vector<double> axis_heat_table(const StepDistribution::AxisWalk& walk, double t, int kmax);

}  // namespace pamb

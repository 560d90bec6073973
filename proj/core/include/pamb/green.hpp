// green.hpp — lattice Green functions of the differences walk: scalar
// Green function, b_2, and G^(m)(0,z) via heat-kernel time integration
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pamb/kernels.hpp"

namespace pamb {

struct GreenResult {
    double value = 0.0;  // meaningful only when !divergent
    double estimated_error = 0.0;
    std::string method;  // "quadrature" or "time-integration"
    bool divergent = false;
    std::vector<std::pair<double, double>> refinement_trace;  // (resolution, value)
};

struct GreenOptions {
    double rel_tol = 1e-8;
    int gl_points_per_panel = 12;
    double t_split = 20.0;  // start of the geometric tail section (diagnostic split)
    std::size_t max_table_doubles = 50'000'000;
    std::vector<int> quad_resolutions = {24, 32, 48, 64, 96, 128, 192, 256};
    double divergence_ratio = 10.0;  // growth across two refinements that flags divergence
    double max_generic_t = 64.0;     // horizon cap for non-axis-aligned kernels
};

// Bulk evaluator of G^(m)(0, z) for one (kernel, m): the time integral
// m * int_0^inf P_t^(m)(0,z) dt on shared quadrature nodes, with the tail
// beyond the last node fitted as t^(-alpha) (C + D/t + E/t^2),
// alpha = d(m-1)/2. Axis-aligned kernels use per-axis 1-d product tables;
// other kernels use d-dimensional heat-kernel tables and window sums.
class GreenEvaluator {
  public:
    GreenEvaluator(const StepDistribution& a, int m, int zmax_axis, GreenOptions opt = {});

    bool divergent() const { return divergent_; }  // d(m-1) <= 2
    int m() const { return m_; }
    int dim() const { return a_.dim(); }
    int zmax_axis() const { return zmax_; }
    double rel_error() const { return rel_error_; }

    // precompute per-(node, axis) multi-point tables so that value() costs
    // O(nodes * d) lookups; axis-aligned kernels only (no-op otherwise).
    // Used by the spectral module, which evaluates millions of offsets.
    void enable_bulk();

    // z is a flattened (m-1) x dim offset; each entry must be within
    // [-zmax_axis, zmax_axis]
    double value(const int* z) const;
    double value(const std::vector<int>& z) const { return value(z.data()); }
    double value_origin() const;

    // m * int t P_t^(m)(0,0) dt (strong-transience diagnostic; needs alpha > 2)
    double t_weighted_origin() const;

    // value at increasing horizon cutoffs, each with a crude one-term tail
    std::vector<std::pair<double, double>> refinement_trace(const int* z) const;

    const StepDistribution& kernel() const { return a_; }

  private:
    double f_at_node(std::size_t node, const int* z) const;  // P_t(0, z) of the differences walk

    StepDistribution a_;
    int m_;
    int zmax_;
    GreenOptions opt_;
    bool divergent_ = false;
    double alpha_ = 0.0;
    double rel_error_ = 0.0;
    double horizon_ = 0.0;

    std::vector<double> node_t_;
    std::vector<double> node_w_;  // includes the tail-fit weights on the last 3 nodes
    std::vector<double> node_w_raw_;
    std::size_t tail_first_ = 0;  // index of the first tail-fit node

    // axis-aligned path: per node, per axis, 1-d table q_t(k), |k| <= kmax_
    bool axis_path_ = false;
    int kmax_ = 0;
    std::vector<std::vector<std::vector<double>>> axis_tables_;  // [node][axis][k + kmax_]

    // bulk mode: S_a(c) = sum_k q(k) prod_p q(c_p + k) tabulated per node/axis
    bool bulk_ = false;
    std::size_t bulk_stride_ = 0;
    std::vector<std::vector<std::vector<double>>> F_;

    // generic path: per node, d-dim table P_t(0, w), |w|_inf <= radius[node]
    std::vector<int> table_radius_;
    std::vector<std::vector<double>> tables_;
};

// (2 pi)^-d  int [1 - A(lambda)]^-1 dlambda for a symmetric kernel.
// Axis-aligned kernels integrate the return probability over time instead;
// the method field records which route ran.
GreenResult green_scalar(const StepDistribution& a_hat, const GreenOptions& opt = {});

struct B2Result {
    double value = 0.0;
    double error = 0.0;
    bool recurrent = false;
};
// b_2 = 2 / G_hat(0,0); recurrent kernels produce the flag, not a throw
B2Result b2(const StepDistribution& a, const GreenOptions& opt = {});

// G^(m)(0, z) for one offset (z flattened, length d(m-1))
GreenResult green_differences(int m, const StepDistribution& a, const std::vector<int>& z,
                              const GreenOptions& opt = {});

// int_0^t P_s(0,0) ds of the rate-`rate` walk with symmetric kernel `a`
// (building block for collision-time means: E T_pair(t) uses rate 2, a_hat)
double return_probability(const StepDistribution& a_sym, double rate, double t);
double return_time_integral(const StepDistribution& a_sym, double rate, double t, double abs_tol = 1e-10);

// E[T^(m)(t)] = C(m,2) * int_0^t P^(2)_s(0,0) ds
double expected_collision_time(int m, const StepDistribution& a, double t);

}  // namespace pamb

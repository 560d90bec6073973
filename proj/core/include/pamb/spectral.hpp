// spectral.hpp — the collision operator K^(m) = sqrt(#) G^(m) sqrt(#) on a
// box-truncated support, its spectral radius, the thresholds b_m = m/lambda_m,
// and the Lyapunov-exponent eigenproblem chi_m(b)
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pamb/diffwalk.hpp"
#include "pamb/green.hpp"

namespace pamb {

struct SpectralOptions {
    double power_tol = 1e-10;    // Rayleigh-quotient convergence
    int max_power_iters = 100000;
    std::size_t state_cap = 5'000'000;
    std::size_t matrix_bytes_cap = 2'000'000'000;  // dense K guard
    std::size_t chi_state_cap = 6'000'000;         // full-box lattice guard
    unsigned threads = 1;
    GreenOptions green;
};

// dense symmetric K over the support states; every entry is positive (the
// Green function never vanishes), so there is no sparsity to exploit
struct KOperatorMatrix {
    int m = 2;
    int L = 0;
    std::vector<RelativeState> states;  // canonical (lexicographic) order
    std::vector<int> sharp;             // collision count per state
    std::vector<double> dense;          // row-major N x N
    std::size_t origin_row = 0;
    double green_error = 0.0;  // relative tolerance of the Green entries
    double g_m00 = 0.0;        // G^(m)(0,0)
    double g_200 = 0.0;        // G^(2)(0,0)

    std::size_t size() const { return states.size(); }
    double entry(std::size_t i, std::size_t j) const { return dense[i * states.size() + j]; }
};

// shared_green, when given, must be an evaluator for (a, m) with
// zmax_axis >= 2L; it avoids rebuilding tables across a box schedule
KOperatorMatrix build_K(int m, const StepDistribution& a, int L, const SpectralOptions& opt = {},
                        GreenEvaluator* shared_green = nullptr);

struct PowerResult {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// power iteration from the origin-state indicator
PowerResult spectral_radius(const KOperatorMatrix& K, double tol = 1e-10, int max_iters = 100000,
                            unsigned threads = 1);

struct BmResult {
    int m = 2;
    bool recurrent = false;  // pair walk recurrent: b_m = 0 regime, no matrix
    std::vector<int> boxes;
    std::vector<double> lambdas;
    std::vector<std::size_t> state_counts;
    bool lambda_monotone = true;
    double lambda_extrapolated = 0.0;
    double lambda_error = 0.0;
    double value = 0.0;  // b_m
    double error = 0.0;
    double sandwich_lower = 0.0;  // #(0) G^(m)(0,0) <= lambda_m
    double sandwich_upper = 0.0;  // lambda_m <= #(0) G^(2)(0,0)
    std::string note;  // extrapolation model metadata (heuristic error bars)
};

BmResult bm(int m, const StepDistribution& a, const std::vector<int>& boxes,
            const SpectralOptions& opt = {});

// matrix-free b diag(#) - m (1 - a^(m)) on the full box lattice with
// absorbing boundary; apply_shifted adds +2m so the spectrum is nonnegative
// and the top eigenvalue dominates in absolute value
class ChiOperatorMatrix {
  public:
    ChiOperatorMatrix(int m, double b, const StepDistribution& a, int L, std::size_t state_cap);

    std::size_t size() const { return volume_; }
    double shift() const { return 2.0 * m_; }
    std::size_t origin_index() const { return origin_; }
    int sharp_at(std::size_t idx) const { return sharp_[idx]; }
    void apply_shifted(const std::vector<double>& in, std::vector<double>& out) const;

  private:
    int m_, dim_, L_, D_;
    double b_;
    std::size_t volume_, origin_;
    std::vector<int> sharp_;
    struct Move {
        std::vector<std::pair<int, int>> touched;  // (coordinate, delta) pairs
        long long index_delta;
        double weight;  // m * a^(m) contribution = a(0,j)
    };
    std::vector<Move> moves_;
    std::vector<long long> strides_;
};

struct ChiResult {
    int m = 2;
    double b = 0.0;
    int L = 0;
    double value = 0.0;           // lower bound of chi_m(b), increasing in L
    double lower_sandwich = 0.0;  // b #(0) - m
    double upper_sandwich = 0.0;  // b #(0)
    std::size_t states = 0;
    int iterations = 0;
    bool converged = false;
};

ChiResult chi_eigen(int m, double b, const StepDistribution& a, int L, const SpectralOptions& opt = {});

struct IntermittencyEntry {
    int m = 0;
    int box = 0;  // box actually used (shrunk when the lattice would blow up)
    double chi = 0.0;
    double chi_over_m = 0.0;
    double bm_value = 0.0;
    double bm_error = 0.0;
};

struct IntermittencyReport {
    double b = 0.0;
    std::vector<IntermittencyEntry> entries;
    bool monotone = true;  // chi_m / m nondecreasing in m
    int order = -1;        // n with b in (b_{n+1}, b_n]; sentinels via label
    std::string order_label;
};

IntermittencyReport check_intermittency(double b, const StepDistribution& a, int m_max, int L,
                                        const SpectralOptions& opt = {});

}  // namespace pamb

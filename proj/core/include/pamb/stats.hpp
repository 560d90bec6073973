// stats.hpp — small estimator helpers shared by the MC modules
#pragma once

#include <cstddef>
#include <vector>

namespace pamb {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& x);

// standard error from fixed contiguous batches (order-deterministic)
MeanSe batch_mean_se(const std::vector<double>& x, std::size_t batches = 64);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};

// weighted least squares with per-point standard errors
LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& se);

}  // namespace pamb

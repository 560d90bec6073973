// stats.cpp
#include "pamb/stats.hpp"

#include <algorithm>
#include <cmath>

#include "pamb/common.hpp"

namespace pamb {

MeanSe mean_se(const std::vector<double>& x) {
    MeanSe r;
    r.n = x.size();
    if (r.n == 0) return r;
    r.mean = pairwise_sum(x) / static_cast<double>(r.n);
    if (r.n < 2) return r;
    double ss = 0.0;
    for (double v : x) ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / (static_cast<double>(r.n) * static_cast<double>(r.n - 1)));
    return r;
}

MeanSe batch_mean_se(const std::vector<double>& x, std::size_t batches) {
    MeanSe r;
    r.n = x.size();
    if (r.n == 0) return r;
    batches = std::max<std::size_t>(2, std::min(batches, r.n));
    std::vector<double> bm(batches, 0.0);
    std::size_t per = r.n / batches;
    std::size_t used = per * batches;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = pairwise_sum(x.data() + b * per, per);
        bm[b] = s / static_cast<double>(per);
    }
    MeanSe inner = mean_se(bm);
    // overall mean uses every sample; the batch spread gives the SE
    r.mean = pairwise_sum(x.data(), used) / static_cast<double>(used);
    r.se = inner.se;
    return r;
}

LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& se) {
    LineFit f;
    const std::size_t n = x.size();
    if (n < 2) return f;
    double sw = 0.0, swx = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = std::max(se[i], 1e-12);
        double w = 1.0 / (s * s);
        sw += w;
        swx += w * x[i];
        swy += w * y[i];
    }
    double xbar = swx / sw, ybar = swy / sw;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = std::max(se[i], 1e-12);
        double w = 1.0 / (s * s);
        num += w * (x[i] - xbar) * (y[i] - ybar);
        den += w * (x[i] - xbar) * (x[i] - xbar);
    }
    f.slope = num / den;
    f.intercept = ybar - f.slope * xbar;
    f.slope_se = std::sqrt(1.0 / den);
    return f;
}

}  // namespace pamb

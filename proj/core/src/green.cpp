// green.cpp
#include "pamb/green.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "pamb/quadrature.hpp"

namespace pamb {

namespace {

// weights w such that int_T0^inf t^p f(t) dt ~= sum_j w_j f(tau_j), assuming
// f(t) = t^-alpha (c0 + c1/t + c2/t^2); tau_3 = T0, beta_j = T0/tau_j
std::array<double, 3> tail_weights(double alpha, const std::array<double, 3>& tau, int t_power = 0) {
    const double T0 = tau[2];
    const double a = alpha - t_power;
    if (a <= 1.0) throw invalid_input("tail_weights: tail integral diverges");
    double V[3][3];
    for (int j = 0; j < 3; ++j) {
        double beta = T0 / tau[static_cast<std::size_t>(j)];
        V[j][0] = 1.0;
        V[j][1] = beta;
        V[j][2] = beta * beta;
    }
    double det = V[0][0] * (V[1][1] * V[2][2] - V[1][2] * V[2][1]) -
                 V[0][1] * (V[1][0] * V[2][2] - V[1][2] * V[2][0]) +
                 V[0][2] * (V[1][0] * V[2][1] - V[1][1] * V[2][0]);
    double inv[3][3];
    inv[0][0] = (V[1][1] * V[2][2] - V[1][2] * V[2][1]) / det;
    inv[0][1] = (V[0][2] * V[2][1] - V[0][1] * V[2][2]) / det;
    inv[0][2] = (V[0][1] * V[1][2] - V[0][2] * V[1][1]) / det;
    inv[1][0] = (V[1][2] * V[2][0] - V[1][0] * V[2][2]) / det;
    inv[1][1] = (V[0][0] * V[2][2] - V[0][2] * V[2][0]) / det;
    inv[1][2] = (V[0][2] * V[1][0] - V[0][0] * V[1][2]) / det;
    inv[2][0] = (V[1][0] * V[2][1] - V[1][1] * V[2][0]) / det;
    inv[2][1] = (V[0][1] * V[2][0] - V[0][0] * V[2][1]) / det;
    inv[2][2] = (V[0][0] * V[1][1] - V[0][1] * V[1][0]) / det;
    // tail = T0^(1-a) * sum_k c~_k / (a - 1 + k), with c~ = V^-1 phi and
    // phi_j = f_j tau_j^alpha
    std::array<double, 3> r{1.0 / (a - 1.0), 1.0 / a, 1.0 / (a + 1.0)};
    std::array<double, 3> w{};
    for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += r[static_cast<std::size_t>(k)] * inv[k][j];
        w[static_cast<std::size_t>(j)] = std::pow(T0, 1.0 - a) * s * std::pow(tau[static_cast<std::size_t>(j)], alpha);
    }
    return w;
}

double min_positive_axis_variance(const StepDistribution& a) {
    double v = -1.0;
    for (int ax = 0; ax < a.dim(); ++ax) {
        double r = a.axis_variance_rate(ax);
        if (r > 0.0 && (v < 0.0 || r < v)) v = r;
    }
    return v <= 0.0 ? 1.0 : v;
}

double max_axis_variance(const StepDistribution& a) {
    double v = 0.0;
    for (int ax = 0; ax < a.dim(); ++ax) v = std::max(v, a.axis_variance_rate(ax));
    return v;
}

}  // namespace

GreenEvaluator::GreenEvaluator(const StepDistribution& a, int m, int zmax_axis, GreenOptions opt)
    : a_(a), m_(m), zmax_(zmax_axis), opt_(std::move(opt)) {
    if (!a_.is_symmetric()) throw invalid_input("GreenEvaluator: kernel must be symmetric");
    if (m_ < 2) throw invalid_input("GreenEvaluator: m must be >= 2");
    if (zmax_ < 0) throw invalid_input("GreenEvaluator: zmax must be >= 0");
    const int d = a_.dim();
    const int D = d * (m_ - 1);
    alpha_ = 0.5 * D;
    divergent_ = (D <= 2);  // the differences walk is recurrent
    if (divergent_) return;

    axis_path_ = a_.axis_aligned();
    const double sig2min = min_positive_axis_variance(a_);
    double t_peak = zmax_ > 0 ? (4.0 * zmax_ * zmax_) / sig2min : 0.0;
    horizon_ = axis_path_ ? 512.0 : 16.0;
    while (horizon_ < 2.0 * t_peak) horizon_ *= 2.0;
    if (!axis_path_ && horizon_ > opt_.max_generic_t)
        throw size_limit_error("GreenEvaluator: offsets too far for the generic-kernel time horizon cap");

    std::vector<double> edges{0.0, 0.5};
    while (edges.back() < horizon_) edges.push_back(std::min(2.0 * edges.back(), horizon_));
    std::vector<double> x, w;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        gauss_nodes_on(opt_.gl_points_per_panel, edges[p], edges[p + 1], x, w);
        node_t_.insert(node_t_.end(), x.begin(), x.end());
        node_w_.insert(node_w_.end(), w.begin(), w.end());
    }
    node_w_raw_ = node_w_;
    tail_first_ = node_t_.size();
    std::array<double, 3> tau{0.70 * horizon_, 0.85 * horizon_, horizon_};
    auto tw = tail_weights(alpha_, tau);
    for (int j = 0; j < 3; ++j) {
        node_t_.push_back(tau[static_cast<std::size_t>(j)]);
        node_w_.push_back(tw[static_cast<std::size_t>(j)]);
        node_w_raw_.push_back(0.0);
    }

    const std::size_t n_nodes = node_t_.size();
    if (axis_path_) {
        const auto& walks = *a_.axis_walks();
        axis_tables_.resize(n_nodes);
        for (std::size_t k = 0; k < n_nodes; ++k) {
            double t = node_t_[k];
            axis_tables_[k].resize(static_cast<std::size_t>(d));
            for (int ax = 0; ax < d; ++ax) {
                double s2 = a_.axis_variance_rate(ax);
                int reach = static_cast<int>(std::ceil(8.5 * std::sqrt(std::max(t, 0.25) * s2))) + 6 * a_.max_offset() + 4;
                int km = reach + zmax_;
                kmax_ = std::max(kmax_, km);
                axis_tables_[k][static_cast<std::size_t>(ax)] = axis_heat_table(walks[static_cast<std::size_t>(ax)], t, km);
            }
        }
    } else {
        tables_.resize(n_nodes);
        table_radius_.resize(n_nodes);
        double max_var = max_axis_variance(a_);
        std::size_t total = 0;
        for (std::size_t k = 0; k < n_nodes; ++k) {
            double t = node_t_[k];
            int r = static_cast<int>(std::ceil(8.5 * std::sqrt(std::max(t, 0.25) * max_var))) + 6 * a_.max_offset() + 4;
            table_radius_[k] = r + zmax_;
            total += box_volume(d, table_radius_[k]);
            if (total > opt_.max_table_doubles)
                throw size_limit_error("GreenEvaluator: generic-kernel tables exceed the memory cap");
        }
        for (std::size_t k = 0; k < n_nodes; ++k) {
            auto tab = heat_kernel(a_, node_t_[k], table_radius_[k]);
            tables_[k] = std::move(tab.values[0]);
        }
    }

    // error model: panel quadrature at ~rel_tol plus the unmodelled 1/t^3
    // correction of the fitted tail, scaled by the tail's share at z = 0
    std::vector<int> z0(static_cast<std::size_t>(D), 0);
    double v0 = value(z0.data());
    double tail0 = 0.0;
    for (std::size_t k = tail_first_; k < node_t_.size(); ++k) tail0 += node_w_[k] * f_at_node(k, z0.data());
    tail0 *= m_;
    double fit_rel = 30.0 / std::pow(0.7 * horizon_, 3.0);
    rel_error_ = opt_.rel_tol + std::abs(tail0) / std::max(v0, 1e-300) * fit_rel;
}

void GreenEvaluator::enable_bulk() {
    if (bulk_ || divergent_ || !axis_path_) return;
    const int d = a_.dim();
    const int blocks = m_ - 1;
    bulk_stride_ = static_cast<std::size_t>(2 * zmax_ + 1);
    std::size_t entries = 1;
    for (int p = 0; p < blocks; ++p) entries *= bulk_stride_;
    F_.resize(node_t_.size());
    std::vector<int> c(static_cast<std::size_t>(blocks));
    for (std::size_t k = 0; k < node_t_.size(); ++k) {
        F_[k].resize(static_cast<std::size_t>(d));
        for (int ax = 0; ax < d; ++ax) {
            const auto& q = axis_tables_[k][static_cast<std::size_t>(ax)];
            const int km = (static_cast<int>(q.size()) - 1) / 2;
            auto& tab = F_[k][static_cast<std::size_t>(ax)];
            tab.assign(entries, 0.0);
            for (std::size_t e = 0; e < entries; ++e) {
                std::size_t rem = e;
                for (int p = blocks - 1; p >= 0; --p) {
                    c[static_cast<std::size_t>(p)] = static_cast<int>(rem % bulk_stride_) - zmax_;
                    rem /= bulk_stride_;
                }
                double s = 0.0;
                for (int j = -km + zmax_; j <= km - zmax_; ++j) {
                    double term = q[static_cast<std::size_t>(j + km)];
                    if (term == 0.0) continue;
                    for (int p = 0; p < blocks; ++p) term *= q[static_cast<std::size_t>(c[static_cast<std::size_t>(p)] + j + km)];
                    s += term;
                }
                tab[e] = s;
            }
        }
    }
    bulk_ = true;
}

double GreenEvaluator::f_at_node(std::size_t node, const int* z) const {
    const int d = a_.dim();
    const int blocks = m_ - 1;
    if (bulk_) {
        double prod = 1.0;
        for (int ax = 0; ax < d; ++ax) {
            std::size_t idx = 0;
            for (int p = 0; p < blocks; ++p) idx = idx * bulk_stride_ + static_cast<std::size_t>(z[p * d + ax] + zmax_);
            prod *= F_[node][static_cast<std::size_t>(ax)][idx];
        }
        return prod;
    }
    if (axis_path_) {
        double prod = 1.0;
        for (int ax = 0; ax < d; ++ax) {
            const auto& q = axis_tables_[node][static_cast<std::size_t>(ax)];
            const int km = (static_cast<int>(q.size()) - 1) / 2;
            double s = 0.0;
            for (int k = -km + zmax_; k <= km - zmax_; ++k) {
                double term = q[static_cast<std::size_t>(k + km)];
                if (term == 0.0) continue;
                for (int p = 0; p < blocks; ++p) term *= q[static_cast<std::size_t>(z[p * d + ax] + k + km)];
                s += term;
            }
            prod *= s;
        }
        return prod;
    }
    const int r = table_radius_[node];
    const auto& tab = tables_[node];
    std::vector<int> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
    for (int ax = 0; ax < d; ++ax) {
        int l = -r, h = r;
        for (int p = 0; p < blocks; ++p) {
            l = std::max(l, -r - z[p * d + ax]);
            h = std::min(h, r - z[p * d + ax]);
        }
        if (l > h) return 0.0;
        lo[static_cast<std::size_t>(ax)] = l;
        hi[static_cast<std::size_t>(ax)] = h;
    }
    double s = 0.0;
    std::vector<int> w(lo.begin(), lo.end());
    std::vector<int> shifted(static_cast<std::size_t>(d));
    while (true) {
        double term = tab[box_index(w.data(), d, r)];
        if (term != 0.0) {
            for (int p = 0; p < blocks && term != 0.0; ++p) {
                for (int ax = 0; ax < d; ++ax) shifted[static_cast<std::size_t>(ax)] = z[p * d + ax] + w[static_cast<std::size_t>(ax)];
                term *= tab[box_index(shifted.data(), d, r)];
            }
            s += term;
        }
        int ax = d - 1;
        while (ax >= 0) {
            if (++w[static_cast<std::size_t>(ax)] <= hi[static_cast<std::size_t>(ax)]) break;
            w[static_cast<std::size_t>(ax)] = lo[static_cast<std::size_t>(ax)];
            --ax;
        }
        if (ax < 0) break;
    }
    return s;
}

double GreenEvaluator::value(const int* z) const {
    if (divergent_) throw invalid_input("GreenEvaluator: divergent Green function has no value");
    for (int i = 0; i < (m_ - 1) * a_.dim(); ++i)
        if (std::abs(z[i]) > zmax_) throw invalid_input("GreenEvaluator: offset outside the configured range");
    double sum = 0.0, raw = 0.0;
    std::array<double, 3> ftail{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < node_t_.size(); ++k) {
        double f = f_at_node(k, z);
        if (k >= tail_first_) ftail[k - tail_first_] = f;
        sum += node_w_[k] * f;
        raw += node_w_raw_[k] * f;
    }
    // the fitted tail presumes f decays across the fit nodes; fall back to a
    // one-term bound when a far offset still peaks there
    if (!(ftail[0] >= ftail[1] && ftail[1] >= ftail[2]))
        return m_ * (raw + ftail[2] * horizon_ / (alpha_ - 1.0));
    return m_ * sum;
}

double GreenEvaluator::value_origin() const {
    std::vector<int> z(static_cast<std::size_t>((m_ - 1) * a_.dim()), 0);
    return value(z.data());
}

double GreenEvaluator::t_weighted_origin() const {
    if (divergent_) throw invalid_input("GreenEvaluator: divergent");
    if (alpha_ <= 2.0) throw invalid_input("t_weighted_origin: diverges for d(m-1) <= 4");
    std::vector<int> z(static_cast<std::size_t>((m_ - 1) * a_.dim()), 0);
    std::array<double, 3> tau{node_t_[tail_first_], node_t_[tail_first_ + 1], node_t_[tail_first_ + 2]};
    auto tw = tail_weights(alpha_, tau, 1);
    double sum = 0.0;
    for (std::size_t k = 0; k < tail_first_; ++k) sum += node_w_raw_[k] * node_t_[k] * f_at_node(k, z.data());
    for (int j = 0; j < 3; ++j)
        sum += tw[static_cast<std::size_t>(j)] * f_at_node(tail_first_ + static_cast<std::size_t>(j), z.data());
    return m_ * sum;
}

std::vector<std::pair<double, double>> GreenEvaluator::refinement_trace(const int* z) const {
    std::vector<std::pair<double, double>> trace;
    double cum = 0.0, last_f = 0.0;
    std::vector<double> cuts{horizon_ / 8.0, horizon_ / 4.0, horizon_ / 2.0};
    std::size_t c = 0;
    for (std::size_t k = 0; k < tail_first_; ++k) {
        if (c < cuts.size() && node_t_[k] > cuts[c]) {
            trace.emplace_back(cuts[c], m_ * (cum + last_f * cuts[c] / (alpha_ - 1.0)));
            ++c;
        }
        last_f = f_at_node(k, z);
        cum += node_w_raw_[k] * last_f;
    }
    trace.emplace_back(horizon_, value(z));
    return trace;
}

// ------------------------------------------------------------ scalar Green

namespace {

// P_t^(m)(0,z) for small boxes via a fresh heat-kernel table (used only on
// recurrent cases to exhibit the growth of the truncated integral)
double diff_walk_return_slow(int m, const StepDistribution& a, const std::vector<int>& z, double t) {
    const int d = a.dim();
    if (t == 0.0) {
        for (int c : z)
            if (c != 0) return 0.0;
        return 1.0;
    }
    int zmax = 0;
    for (int c : z) zmax = std::max(zmax, std::abs(c));
    double max_var = max_axis_variance(a);
    int r = static_cast<int>(std::ceil(8.5 * std::sqrt(std::max(t, 0.25) * max_var))) + 6 * a.max_offset() + 4 + zmax;
    auto tab = heat_kernel(a, t, r).values[0];
    const int blocks = m - 1;
    std::vector<int> w(static_cast<std::size_t>(d), -r + zmax);
    std::vector<int> shifted(static_cast<std::size_t>(d));
    double s = 0.0;
    while (true) {
        double term = tab[box_index(w.data(), d, r)];
        if (term != 0.0) {
            for (int p = 0; p < blocks && term != 0.0; ++p) {
                for (int ax = 0; ax < d; ++ax) shifted[static_cast<std::size_t>(ax)] = z[static_cast<std::size_t>(p * d + ax)] + w[static_cast<std::size_t>(ax)];
                term *= tab[box_index(shifted.data(), d, r)];
            }
            s += term;
        }
        int ax = d - 1;
        while (ax >= 0) {
            if (++w[static_cast<std::size_t>(ax)] <= r - zmax) break;
            w[static_cast<std::size_t>(ax)] = -r + zmax;
            --ax;
        }
        if (ax < 0) break;
    }
    return s;
}

GreenResult green_scalar_quadrature(const StepDistribution& a, const GreenOptions& opt) {
    GreenResult res;
    res.method = "quadrature";
    if (a.dim() > 4) throw size_limit_error("green_scalar: tensor quadrature limited to d <= 4");
    std::vector<double> vals, extrap;
    std::vector<int> ns;
    for (int n : opt.quad_resolutions) {
        if (n % 2) ++n;  // even rules keep lambda = 0 off the grid
        ns.push_back(n);
        std::vector<double> x, w;
        gauss_nodes_on(n, -M_PI, M_PI, x, w);
        const int d = a.dim();
        double inv2pi = 1.0 / (2.0 * M_PI);
        std::size_t grid = 1;
        for (int ax = 0; ax < d; ++ax) grid *= static_cast<std::size_t>(n);
        std::vector<double> lambda(static_cast<std::size_t>(d));
        double sum = 0.0;
        for (std::size_t g = 0; g < grid; ++g) {
            std::size_t rem = g;
            double weight = 1.0;
            for (int ax = d - 1; ax >= 0; --ax) {
                std::size_t i = rem % static_cast<std::size_t>(n);
                rem /= static_cast<std::size_t>(n);
                lambda[static_cast<std::size_t>(ax)] = x[i];
                weight *= w[i] * inv2pi;
            }
            double denom = 1.0 - structure_function(a, lambda);
            if (denom > 0.0) sum += weight / denom;
        }
        vals.push_back(sum);
        res.refinement_trace.emplace_back(static_cast<double>(n), sum);
        std::size_t k = vals.size();
        if (k >= 3 && vals[k - 1] >= opt.divergence_ratio * vals[k - 3]) {
            res.divergent = true;
            return res;
        }
        if (k >= 2) {
            // fit v(n) = v_inf - c/n on the last pair
            double c = (vals[k - 1] - vals[k - 2]) / (1.0 / ns[k - 2] - 1.0 / ns[k - 1]);
            extrap.push_back(vals[k - 1] + c / ns[k - 1]);
        }
        if (extrap.size() >= 2) {
            double e1 = extrap[extrap.size() - 2], e2 = extrap.back();
            if (std::abs(e2 - e1) <= 2e-5 * std::abs(e2)) {
                res.value = e2;
                res.estimated_error = std::abs(e2 - e1) + 1e-6 * std::abs(e2);
                return res;
            }
        }
    }
    if (extrap.size() >= 2 && std::abs(extrap.back() - extrap[extrap.size() - 2]) > 1e-3 * std::abs(extrap.back())) {
        res.divergent = true;  // the extrapolated trace keeps drifting
        return res;
    }
    res.value = extrap.empty() ? vals.back() : extrap.back();
    res.estimated_error = extrap.size() >= 2 ? std::abs(extrap.back() - extrap[extrap.size() - 2]) : 0.1 * res.value;
    return res;
}

}  // namespace

GreenResult green_scalar(const StepDistribution& a_hat, const GreenOptions& opt) {
    if (!a_hat.is_symmetric()) throw invalid_input("green_scalar: kernel must be symmetric");
    if (a_hat.dim() <= 2) {
        // finite-variance symmetric walks in d <= 2 are recurrent
        GreenResult res;
        res.method = "time-integration";
        res.divergent = true;
        for (double T : {16.0, 64.0, 256.0, 1024.0})
            res.refinement_trace.emplace_back(T, return_time_integral(a_hat, 1.0, T, 1e-8));
        return res;
    }
    if (a_hat.axis_aligned()) {
        GreenResult res;
        res.method = "time-integration";
        GreenEvaluator ev(a_hat, 2, 0, opt);
        res.value = ev.value_origin();
        res.estimated_error = ev.rel_error() * res.value;
        std::vector<int> z0(static_cast<std::size_t>(a_hat.dim()), 0);
        res.refinement_trace = ev.refinement_trace(z0.data());
        return res;
    }
    return green_scalar_quadrature(a_hat, opt);
}

B2Result b2(const StepDistribution& a, const GreenOptions& opt) {
    StepDistribution a_hat = symmetrize(a);
    GreenResult g = green_scalar(a_hat, opt);
    B2Result r;
    if (g.divergent) {
        r.recurrent = true;  // system dies out for every b > 0
        return r;
    }
    r.value = 2.0 / g.value;
    r.error = 2.0 * g.estimated_error / (g.value * g.value);
    return r;
}

GreenResult green_differences(int m, const StepDistribution& a, const std::vector<int>& z,
                              const GreenOptions& opt) {
    if (m < 2) throw invalid_input("green_differences: m must be >= 2");
    if (!a.is_symmetric()) throw invalid_input("green_differences: kernel must be symmetric");
    if (static_cast<int>(z.size()) != (m - 1) * a.dim())
        throw invalid_input("green_differences: offset must have d(m-1) entries");
    GreenResult res;
    res.method = "time-integration";
    if (a.dim() * (m - 1) <= 2) {
        res.divergent = true;
        for (double T : {16.0, 64.0, 256.0}) {
            double v = adaptive_simpson([&](double t) { return diff_walk_return_slow(m, a, z, t); }, 0.0, T, 1e-7);
            res.refinement_trace.emplace_back(T, m * v);
        }
        return res;
    }
    int zmax = 0;
    for (int c : z) zmax = std::max(zmax, std::abs(c));
    GreenEvaluator ev(a, m, zmax, opt);
    res.value = ev.value(z.data());
    res.estimated_error = ev.rel_error() * res.value;
    res.refinement_trace = ev.refinement_trace(z.data());
    return res;
}

double return_probability(const StepDistribution& a_sym, double rate, double t) {
    if (!a_sym.is_symmetric()) throw invalid_input("return_probability: kernel must be symmetric");
    if (t == 0.0) return 1.0;
    if (a_sym.axis_aligned()) {
        double prod = 1.0;
        for (const auto& w : *a_sym.axis_walks()) {
            StepDistribution::AxisWalk scaled = w;
            scaled.rate *= rate;
            prod *= axis_heat_table(scaled, t, 0)[0];
        }
        return prod;
    }
    const int d = a_sym.dim();
    if (d > 4) throw size_limit_error("return_probability: d <= 4 for non-axis-aligned kernels");
    double max_var = max_axis_variance(a_sym);
    int n = std::max(64, static_cast<int>(std::ceil(4.0 * a_sym.max_offset() * std::sqrt(rate * t * max_var))) + 48);
    n = std::min(n, 256);
    if (n % 2) ++n;
    std::vector<double> x, w;
    gauss_nodes_on(n, -M_PI, M_PI, x, w);
    double inv2pi = 1.0 / (2.0 * M_PI);
    std::size_t grid = 1;
    for (int ax = 0; ax < d; ++ax) grid *= static_cast<std::size_t>(n);
    std::vector<double> lambda(static_cast<std::size_t>(d));
    double sum = 0.0;
    for (std::size_t g = 0; g < grid; ++g) {
        std::size_t rem = g;
        double weight = 1.0;
        for (int ax = d - 1; ax >= 0; --ax) {
            std::size_t i = rem % static_cast<std::size_t>(n);
            rem /= static_cast<std::size_t>(n);
            lambda[static_cast<std::size_t>(ax)] = x[i];
            weight *= w[i] * inv2pi;
        }
        sum += weight * std::exp(-rate * t * (1.0 - structure_function(a_sym, lambda)));
    }
    return std::max(sum, 0.0);
}

double return_time_integral(const StepDistribution& a_sym, double rate, double t, double abs_tol) {
    return adaptive_simpson([&](double s) { return return_probability(a_sym, rate, s); }, 0.0, t, abs_tol);
}

double expected_collision_time(int m, const StepDistribution& a, double t) {
    StepDistribution a_hat = symmetrize(a);
    double pair_mean = return_time_integral(a_hat, 2.0, t);
    return 0.5 * m * (m - 1) * pair_mean;
}

}  // namespace pamb

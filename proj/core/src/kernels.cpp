// kernels.cpp
#include "pamb/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "pamb/quadrature.hpp"

namespace pamb {

namespace {

// lattice generated by the offsets equals Z^d  <=>  the Hermite form of the
// offset matrix has unit diagonal
bool lattice_spans_zd(const std::vector<StepDistribution::Step>& steps, int dim) {
    std::vector<std::vector<long long>> rows;
    for (const auto& s : steps) rows.emplace_back(s.offset.begin(), s.offset.end());
    int rank = 0;
    long long det = 1;
    for (int col = 0; col < dim; ++col) {
        // reduce column by gcd-style row operations
        while (true) {
            int pivot = -1;
            long long best = 0;
            for (std::size_t r = static_cast<std::size_t>(rank); r < rows.size(); ++r) {
                long long v = std::llabs(rows[r][static_cast<std::size_t>(col)]);
                if (v != 0 && (pivot < 0 || v < best)) {
                    pivot = static_cast<int>(r);
                    best = v;
                }
            }
            if (pivot < 0) return false;  // column rank deficient
            std::swap(rows[static_cast<std::size_t>(rank)], rows[static_cast<std::size_t>(pivot)]);
            bool clean = true;
            for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < rows.size(); ++r) {
                long long q = rows[r][static_cast<std::size_t>(col)] / rows[static_cast<std::size_t>(rank)][static_cast<std::size_t>(col)];
                if (q != 0) {
                    for (int c = 0; c < dim; ++c)
                        rows[r][static_cast<std::size_t>(c)] -= q * rows[static_cast<std::size_t>(rank)][static_cast<std::size_t>(c)];
                }
                if (rows[r][static_cast<std::size_t>(col)] != 0) clean = false;
            }
            if (clean) break;
        }
        det *= std::llabs(rows[static_cast<std::size_t>(rank)][static_cast<std::size_t>(col)]);
        ++rank;
        if (rank == dim) break;
    }
    return rank == dim && det == 1;
}

// forward-or-backward reachability of all unit-box targets inside a working
// box; exact for the kernels used here, heuristic in exotic cases
bool reachability_irreducible(const StepDistribution& a) {
    int dim = a.dim();
    int B = 4 * a.max_offset() * dim + 4;
    if (box_volume(dim, B) > 5'000'000) {
        // working box too large to scan; fall back to the group-span test
        return lattice_spans_zd(a.support(), dim);
    }
    std::unordered_set<std::size_t> reach;
    std::vector<Point> frontier{Point(static_cast<std::size_t>(dim), 0)};
    reach.insert(box_index(frontier[0].data(), dim, B));
    while (!frontier.empty()) {
        std::vector<Point> next;
        for (const Point& p : frontier) {
            for (const auto& s : a.support()) {
                Point q = p;
                bool inside = true;
                for (int c = 0; c < dim; ++c) {
                    q[static_cast<std::size_t>(c)] += s.offset[static_cast<std::size_t>(c)];
                    if (std::abs(q[static_cast<std::size_t>(c)]) > B) inside = false;
                }
                if (!inside) continue;
                auto idx = box_index(q.data(), dim, B);
                if (reach.insert(idx).second) next.push_back(std::move(q));
            }
        }
        frontier = std::move(next);
    }
    bool ok = true;
    for_each_in_box(dim, std::max(1, a.max_offset()), [&](const Point& x) {
        if (is_zero(x)) return;
        Point nx = negated(x);
        bool fwd = reach.count(box_index(x.data(), dim, B)) > 0;
        bool bwd = reach.count(box_index(nx.data(), dim, B)) > 0;
        if (!fwd && !bwd) ok = false;
    });
    return ok && lattice_spans_zd(a.support(), dim);
}

}  // namespace

StepDistribution::StepDistribution(int dim, std::vector<Step> steps) : dim_(dim), steps_(std::move(steps)) {
    if (dim_ < 1) throw invalid_input("kernel: dim must be >= 1");
    if (steps_.empty()) throw invalid_input("kernel: empty support");
    double total = 0.0;
    std::unordered_set<std::size_t> seen;
    for (const auto& s : steps_) {
        if (static_cast<int>(s.offset.size()) != dim_) throw invalid_input("kernel: offset dimension mismatch");
        if (is_zero(s.offset)) throw invalid_input("kernel: offset 0 is not allowed (a(0,0) = 0)");
        if (!(s.prob > 0.0)) throw invalid_input("kernel: probabilities must be positive");
        if (!seen.insert(hash_ints(s.offset.data(), s.offset.size())).second)
            throw invalid_input("kernel: duplicate offset in support");
        total += s.prob;
        max_offset_ = std::max(max_offset_, linf_norm(s.offset));
    }
    if (std::abs(total - 1.0) > 1e-12) throw invalid_input("kernel: probabilities must sum to 1 (within 1e-12)");

    // canonical order: lexicographic on offsets (stable hashing and output)
    std::sort(steps_.begin(), steps_.end(), [](const Step& a, const Step& b) { return a.offset < b.offset; });

    std::unordered_map<std::uint64_t, double> by_offset;
    for (const auto& s : steps_) by_offset[hash_ints(s.offset.data(), s.offset.size())] = s.prob;
    symmetric_ = true;
    for (const auto& s : steps_) {
        Point n = negated(s.offset);
        auto it = by_offset.find(hash_ints(n.data(), n.size()));
        if (it == by_offset.end() || std::abs(it->second - s.prob) > 1e-12) {
            symmetric_ = false;
            break;
        }
    }

    std::uint64_t h = fnv1a64(&dim_, sizeof dim_);
    for (const auto& s : steps_) {
        h = fnv1a64(s.offset.data(), s.offset.size() * sizeof(int), h);
        h = fnv1a64(&s.prob, sizeof s.prob, h);
    }
    hash_ = h;

    // per-axis decomposition when every jump moves exactly one axis
    bool aligned = true;
    for (const auto& s : steps_) {
        int nz = 0;
        for (int c : s.offset) nz += (c != 0);
        if (nz != 1) {
            aligned = false;
            break;
        }
    }
    if (aligned) {
        std::vector<AxisWalk> walks(static_cast<std::size_t>(dim_));
        for (const auto& s : steps_) {
            for (int a = 0; a < dim_; ++a) {
                int c = s.offset[static_cast<std::size_t>(a)];
                if (c != 0) {
                    walks[static_cast<std::size_t>(a)].rate += s.prob;
                    walks[static_cast<std::size_t>(a)].steps.emplace_back(c, s.prob);
                }
            }
        }
        for (auto& w : walks) {
            for (auto& st : w.steps) st.second /= (w.rate > 0.0 ? w.rate : 1.0);
            std::sort(w.steps.begin(), w.steps.end());
        }
        axis_walks_ = std::move(walks);
    }

    irreducible_ = reachability_irreducible(*this);
}

double StepDistribution::prob(const Point& offset) const {
    for (const auto& s : steps_)
        if (s.offset == offset) return s.prob;
    return 0.0;
}

double StepDistribution::axis_variance_rate(int axis) const {
    double v = 0.0;
    for (const auto& s : steps_) {
        double c = s.offset[static_cast<std::size_t>(axis)];
        v += s.prob * c * c;
    }
    return v;
}

std::string StepDistribution::describe() const {
    std::ostringstream os;
    os << "d=" << dim_ << " steps{";
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (i) os << ", ";
        os << "(";
        for (std::size_t c = 0; c < steps_[i].offset.size(); ++c) {
            if (c) os << ",";
            os << steps_[i].offset[c];
        }
        os << "):" << steps_[i].prob;
    }
    os << "}";
    return os.str();
}

StepDistribution symmetrize(const StepDistribution& a) {
    std::map<Point, double> m;
    for (const auto& s : a.support()) {
        m[s.offset] += 0.5 * s.prob;
        m[negated(s.offset)] += 0.5 * s.prob;
    }
    std::vector<StepDistribution::Step> steps;
    for (auto& [off, p] : m) steps.push_back({off, p});
    return StepDistribution(a.dim(), std::move(steps));
}

StepDistribution reflect(const StepDistribution& a) {
    std::vector<StepDistribution::Step> steps;
    for (const auto& s : a.support()) steps.push_back({negated(s.offset), s.prob});
    return StepDistribution(a.dim(), std::move(steps));
}

double structure_function(const StepDistribution& a, const std::vector<double>& lambda) {
    if (!a.is_symmetric())
        throw invalid_input("structure_function: kernel must be symmetric (Fourier analytics are restricted to symmetric kernels)");
    if (static_cast<int>(lambda.size()) != a.dim()) throw invalid_input("structure_function: lambda dimension mismatch");
    double A = 0.0;
    for (const auto& s : a.support()) {
        double phase = 0.0;
        for (int c = 0; c < a.dim(); ++c) phase += s.offset[static_cast<std::size_t>(c)] * lambda[static_cast<std::size_t>(c)];
        A += s.prob * std::cos(phase);
    }
    return A;
}

StepDistribution srw_kernel(int dim) {
    std::vector<StepDistribution::Step> steps;
    for (int a = 0; a < dim; ++a) {
        for (int sgn : {-1, 1}) {
            Point off(static_cast<std::size_t>(dim), 0);
            off[static_cast<std::size_t>(a)] = sgn;
            steps.push_back({off, 1.0 / (2.0 * dim)});
        }
    }
    return StepDistribution(dim, std::move(steps));
}

StepDistribution drift_kernel(double p) {
    if (!(p > 0.0 && p < 1.0)) throw invalid_input("drift kernel: p must be in (0,1)");
    return StepDistribution(1, {{{1}, p}, {{-1}, 1.0 - p}});
}

StepDistribution parse_kernel_config(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int dim = 0;
    std::vector<StepDistribution::Step> steps;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        if (eq == std::string::npos) throw invalid_input("kernel config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = line.substr(0, eq);
        key.erase(std::remove_if(key.begin(), key.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }), key.end());
        std::istringstream val(line.substr(eq + 1));
        if (key == "dim") {
            if (!(val >> dim)) throw invalid_input("kernel config: bad dim");
        } else if (key == "step") {
            if (dim <= 0) throw invalid_input("kernel config: dim must come before step entries");
            Point off(static_cast<std::size_t>(dim));
            for (int c = 0; c < dim; ++c)
                if (!(val >> off[static_cast<std::size_t>(c)])) throw invalid_input("kernel config line " + std::to_string(lineno) + ": bad step offsets");
            double p;
            if (!(val >> p)) throw invalid_input("kernel config line " + std::to_string(lineno) + ": missing step probability");
            steps.push_back({std::move(off), p});
        } else {
            throw invalid_input("kernel config: unknown key '" + key + "'");
        }
    }
    if (dim <= 0) throw invalid_input("kernel config: missing dim");
    return StepDistribution(dim, std::move(steps));
}

StepDistribution load_kernel_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw invalid_input("cannot open kernel file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_kernel_config(buf.str());
}

StepDistribution parse_kernel_spec(const std::string& spec, int dim) {
    if (spec == "srw") {
        if (dim <= 0) throw invalid_input("kernel spec 'srw' needs --dim");
        return srw_kernel(dim);
    }
    if (spec.rfind("drift:", 0) == 0) return drift_kernel(std::stod(spec.substr(6)));
    if (spec.rfind("file:", 0) == 0) return load_kernel_file(spec.substr(5));
    throw invalid_input("unknown kernel spec '" + spec + "' (expected srw, drift:p or file:PATH)");
}

// ---------------------------------------------------------------- heat kernel

std::vector<double> axis_heat_table(const StepDistribution::AxisWalk& walk, double t, int kmax) {
    std::vector<double> q(static_cast<std::size_t>(2 * kmax + 1), 0.0);
    if (walk.rate <= 0.0 || t == 0.0) {
        // axis never moves (or zero time): unit mass at 0
        q[static_cast<std::size_t>(kmax)] = 1.0;
        return q;
    }
    int n = std::max(96, 2 * kmax + 64);
    std::vector<double> x, w;
    gauss_nodes_on(n, -M_PI, M_PI, x, w);
    const double inv2pi = 1.0 / (2.0 * M_PI);
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double A = 0.0;
        for (const auto& [s, p] : walk.steps) A += p * std::cos(s * x[static_cast<std::size_t>(i)]);
        f[static_cast<std::size_t>(i)] = std::exp(-walk.rate * t * (1.0 - A)) * w[static_cast<std::size_t>(i)] * inv2pi;
    }
    for (int k = -kmax; k <= kmax; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::cos(k * x[static_cast<std::size_t>(i)]) * f[static_cast<std::size_t>(i)];
        q[static_cast<std::size_t>(k + kmax)] = std::max(s, 0.0);
    }
    return q;
}

HeatKernelTable heat_kernel(const StepDistribution& a, const std::vector<double>& times, int box,
                            const HeatKernelOptions& opt) {
    if (!a.is_symmetric()) throw invalid_input("heat_kernel: requires a symmetric kernel");
    for (double t : times)
        if (t < 0.0) throw invalid_input("heat_kernel: t must be >= 0");
    const int d = a.dim();
    HeatKernelTable table{a, times, box, {}, {}, false};
    table.values.reserve(times.size());

    double max_var = 0.0;
    for (int ax = 0; ax < d; ++ax) max_var = std::max(max_var, a.axis_variance_rate(ax));

    for (double t : times) {
        std::vector<double> slice(box_volume(d, box), 0.0);
        if (t == 0.0) {
            Point origin(static_cast<std::size_t>(d), 0);
            slice[box_index(origin.data(), d, box)] = 1.0;
        } else if (a.axis_aligned()) {
            // product of independent 1-d axis walks
            const auto& walks = *a.axis_walks();
            std::vector<std::vector<double>> q(static_cast<std::size_t>(d));
            for (int ax = 0; ax < d; ++ax) q[static_cast<std::size_t>(ax)] = axis_heat_table(walks[static_cast<std::size_t>(ax)], t, box);
            for_each_in_box(d, box, [&](const Point& i) {
                double v = 1.0;
                for (int ax = 0; ax < d; ++ax) v *= q[static_cast<std::size_t>(ax)][static_cast<std::size_t>(i[static_cast<std::size_t>(ax)] + box)];
                slice[box_index(i.data(), d, box)] = v;
            });
        } else {
            // tensor Gauss-Legendre over [-pi,pi]^d, then axis-by-axis
            // partial transforms to all box offsets at once
            int band = static_cast<int>(std::ceil(8.0 * std::sqrt(std::max(t, 1.0) * max_var))) + 4 * a.max_offset() + 4;
            int n = std::max(opt.quad_nodes_per_axis, (7 * (box + band)) / 10 + 24);
            if (d > 4) throw invalid_input("heat_kernel: tensor quadrature limited to d <= 4 for non-axis-aligned kernels");
            std::vector<double> x, w;
            gauss_nodes_on(n, -M_PI, M_PI, x, w);
            std::size_t grid = 1;
            for (int ax = 0; ax < d; ++ax) grid *= static_cast<std::size_t>(n);
            // integrand on the full grid
            std::vector<std::complex<double>> acc(grid);
            {
                // per-axis phase tables for the structure function
                std::vector<double> lambda(static_cast<std::size_t>(d));
                std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
                for (std::size_t g = 0; g < grid; ++g) {
                    std::size_t rem = g;
                    for (int ax = d - 1; ax >= 0; --ax) {
                        idx[static_cast<std::size_t>(ax)] = rem % static_cast<std::size_t>(n);
                        rem /= static_cast<std::size_t>(n);
                    }
                    double A = 0.0;
                    for (const auto& s : a.support()) {
                        double phase = 0.0;
                        for (int ax = 0; ax < d; ++ax) phase += s.offset[static_cast<std::size_t>(ax)] * x[idx[static_cast<std::size_t>(ax)]];
                        A += s.prob * std::cos(phase);
                    }
                    acc[g] = std::exp(-t * (1.0 - A));
                }
            }
            // contract one axis at a time: lambda_ax -> lattice coordinate
            const std::size_t K = static_cast<std::size_t>(2 * box + 1);
            std::vector<std::complex<double>> phase_tab(K * static_cast<std::size_t>(n));
            std::size_t lam_block = grid;  // remaining lambda block size
            std::size_t out_prefix = 1;    // already-transformed lattice block
            for (int ax = 0; ax < d; ++ax) {
                lam_block /= static_cast<std::size_t>(n);
                for (int k = -box; k <= box; ++k)
                    for (int i = 0; i < n; ++i)
                        phase_tab[static_cast<std::size_t>(k + box) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] =
                            std::polar(w[static_cast<std::size_t>(i)] / (2.0 * M_PI), k * x[static_cast<std::size_t>(i)]);
                std::vector<std::complex<double>> out(out_prefix * K * lam_block);
                for (std::size_t pre = 0; pre < out_prefix; ++pre)
                    for (std::size_t k = 0; k < K; ++k)
                        for (std::size_t rest = 0; rest < lam_block; ++rest) {
                            std::complex<double> s{0.0, 0.0};
                            const std::complex<double>* src = &acc[pre * static_cast<std::size_t>(n) * lam_block + rest];
                            const std::complex<double>* ph = &phase_tab[k * static_cast<std::size_t>(n)];
                            for (int i = 0; i < n; ++i) s += ph[static_cast<std::size_t>(i)] * src[static_cast<std::size_t>(i) * lam_block];
                            out[(pre * K + k) * lam_block + rest] = s;
                        }
                acc = std::move(out);
                out_prefix *= K;
            }
            for (std::size_t g = 0; g < slice.size(); ++g) slice[g] = std::max(acc[g].real(), 0.0);
        }
        double mass = 0.0;
        for (double v : slice) mass += v;
        table.truncation_mass.push_back(std::max(0.0, 1.0 - mass));
        if (1.0 - mass > opt.warn_mass) table.truncation_warning = true;
        table.values.push_back(std::move(slice));
    }
    return table;
}

}  // namespace pamb

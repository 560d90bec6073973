// quadrature.hpp — Gauss–Legendre rules and adaptive Simpson
#pragma once

#include <functional>
#include <vector>

namespace pamb {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

// n-point Gauss–Legendre rule (Newton iteration on P_n; cached per n)
const GaussRule& gauss_legendre(int n);

// nodes/weights of the n-point rule mapped to [a, b]
void gauss_nodes_on(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 28);

}  // namespace pamb

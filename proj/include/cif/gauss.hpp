#pragma once

#include <vector>

namespace cif {

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1], increasing
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, computed by Newton iteration on P_n.
GaussRule gauss_legendre(int n);

} // namespace cif

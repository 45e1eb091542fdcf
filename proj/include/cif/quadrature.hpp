#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "cif/torus_function.hpp"

namespace cif {

/// Dyadic radial subdivision around the origin for integrands that are radial
/// and singular there.  A smooth cutoff chi(r) (1 for r <= inner, 0 for r >= outer)
/// hands the region near the origin to a radial Gauss-Legendre rule on the
/// shells [outer 2^{-l-1}, outer 2^{-l}], l < levels, plus the innermost ball;
/// the uniform grid keeps the weight (1 - chi).
struct RadialRefinement {
    double inner = 0.2;
    double outer = 1.0;
    int levels = 12;
    int gauss_order = 16;
};

/// Product trapezoidal rule on [-pi, pi)^d with nodes x_j = -pi + 2 pi j / n,
/// optionally augmented by a RadialRefinement.  Weights sum to (2 pi)^d.
class QuadratureGrid {
public:
    static QuadratureGrid uniform(int d, int resolution);
    static QuadratureGrid refined(int d, int resolution, RadialRefinement refinement = {});
    /// Uniform grid, refined when f has a radial singularity at the origin.
    static QuadratureGrid for_function(const TorusFunction& f, int resolution);

    [[nodiscard]] int dim() const noexcept { return d_; }
    [[nodiscard]] int resolution() const noexcept { return resolution_; }
    [[nodiscard]] const std::optional<RadialRefinement>& refinement() const noexcept { return refinement_; }

    [[nodiscard]] std::size_t uniform_size() const noexcept { return uniform_weights_.size(); }
    [[nodiscard]] const std::vector<double>& uniform_weights() const noexcept { return uniform_weights_; }
    /// Coordinates of uniform node i (row-major, axis 0 slowest).
    [[nodiscard]] std::array<double, 3> uniform_node(std::size_t i) const;

    [[nodiscard]] const std::vector<double>& radial_nodes() const noexcept { return radial_nodes_; }
    [[nodiscard]] const std::vector<double>& radial_weights() const noexcept { return radial_weights_; }

    [[nodiscard]] double weight_sum() const;

    /// Values of f at every node: uniform nodes first, then radial nodes
    /// (evaluated through f.radial_value).  Aligned with weights().
    [[nodiscard]] std::vector<std::complex<double>> sample(const TorusFunction& f) const;
    [[nodiscard]] std::vector<double> weights() const;

private:
    QuadratureGrid(int d, int resolution) : d_(d), resolution_(resolution) {}

    int d_;
    int resolution_;
    std::optional<RadialRefinement> refinement_;
    std::vector<double> uniform_weights_;
    std::vector<double> radial_nodes_;
    std::vector<double> radial_weights_;
};

/// C-infinity cutoff equal to 1 on [0, inner] and 0 on [outer, inf).
double smooth_cutoff(double r, double inner, double outer);

/// Surface area of the unit sphere S^{d-1}.
double sphere_area(int d);

/// sum_i w_i v_i with compensated summation.
double weighted_sum(const std::vector<double>& values, const std::vector<double>& weights);

} // namespace cif

#include "cif/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "cif/errors.hpp"
#include "cif/gauss.hpp"

namespace cif {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t ipow(std::size_t base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

} // namespace

double smooth_cutoff(double r, double inner, double outer) {
    if (r <= inner) return 1.0;
    if (r >= outer) return 0.0;
    const double t = (outer - r) / (outer - inner); // 1 at inner, 0 at outer
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double sphere_area(int d) {
    switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    case 3: return 4.0 * kPi;
    default: throw UnsupportedDimension("sphere_area supports d = 1, 2, 3");
    }
}

double weighted_sum(const std::vector<double>& values, const std::vector<double>& weights) {
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double y = values[i] * weights[i] - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

QuadratureGrid QuadratureGrid::uniform(int d, int resolution) {
    if (d < 1 || d > 3) throw UnsupportedDimension("quadrature grids support d = 1, 2, 3");
    if (resolution < 2) throw InvalidParameter("grid resolution must be at least 2");
    QuadratureGrid g(d, resolution);
    const double h = 2.0 * kPi / resolution;
    g.uniform_weights_.assign(ipow(static_cast<std::size_t>(resolution), d), std::pow(h, d));
    return g;
}

QuadratureGrid QuadratureGrid::refined(int d, int resolution, RadialRefinement refinement) {
    QuadratureGrid g = uniform(d, resolution);
    if (!(refinement.inner > 0.0 && refinement.inner < refinement.outer && refinement.outer < kPi) ||
        refinement.levels < 1 || refinement.gauss_order < 1)
        throw InvalidParameter("invalid radial refinement descriptor");
    g.refinement_ = refinement;

    // Uniform part keeps (1 - chi); its chi-mass moves to the radial rule.
    double chi_mass_uniform = 0.0;
    for (std::size_t i = 0; i < g.uniform_weights_.size(); ++i) {
        const auto x = g.uniform_node(i);
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        const double chi = smooth_cutoff(r, refinement.inner, refinement.outer);
        chi_mass_uniform += g.uniform_weights_[i] * chi;
        g.uniform_weights_[i] *= 1.0 - chi;
    }

    const auto rule = gauss_legendre(refinement.gauss_order);
    const double area = sphere_area(d);
    auto add_panel = [&](double a, double b) {
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double r = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
            const double w = 0.5 * (b - a) * rule.weights[q];
            g.radial_nodes_.push_back(r);
            g.radial_weights_.push_back(area * std::pow(r, d - 1) * w *
                                        smooth_cutoff(r, refinement.inner, refinement.outer));
        }
    };
    double upper = refinement.outer;
    for (int l = 0; l < refinement.levels; ++l) {
        add_panel(0.5 * upper, upper);
        upper *= 0.5;
    }
    add_panel(0.0, upper);

    // Match the radial chi-mass to the uniform one so the weights sum to (2 pi)^d exactly.
    double chi_mass_radial = 0.0;
    for (double w : g.radial_weights_) chi_mass_radial += w;
    for (double& w : g.radial_weights_) w *= chi_mass_uniform / chi_mass_radial;
    return g;
}

QuadratureGrid QuadratureGrid::for_function(const TorusFunction& f, int resolution) {
    if (f.is_radial_singular()) return refined(f.dim(), resolution);
    return uniform(f.dim(), resolution);
}

std::array<double, 3> QuadratureGrid::uniform_node(std::size_t i) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    const double h = 2.0 * kPi / resolution_;
    const auto n = static_cast<std::size_t>(resolution_);
    for (int axis = d_ - 1; axis >= 0; --axis) {
        x[static_cast<std::size_t>(axis)] = -kPi + h * static_cast<double>(i % n);
        i /= n;
    }
    return x;
}

double QuadratureGrid::weight_sum() const {
    std::vector<double> w = weights();
    return weighted_sum(w, std::vector<double>(w.size(), 1.0));
}

std::vector<double> QuadratureGrid::weights() const {
    std::vector<double> w(uniform_weights_);
    w.insert(w.end(), radial_weights_.begin(), radial_weights_.end());
    return w;
}

std::vector<std::complex<double>> QuadratureGrid::sample(const TorusFunction& f) const {
    if (f.dim() != d_) throw InvalidParameter("grid dimension does not match the function");
    if (!radial_nodes_.empty() && !f.is_radial_singular())
        throw ContractViolation("radially refined grids only apply to radial families");
    std::vector<std::complex<double>> out;
    out.reserve(uniform_weights_.size() + radial_nodes_.size());
    for (std::size_t i = 0; i < uniform_weights_.size(); ++i) {
        const auto x = uniform_node(i);
        out.push_back(f(std::span<const double>(x.data(), static_cast<std::size_t>(d_))));
    }
    for (double r : radial_nodes_) out.emplace_back(f.radial_value(r));
    return out;
}

} // namespace cif

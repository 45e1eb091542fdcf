#pragma once

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace cif {

enum class Family {
    constant,
    cosine_mode,    // amplitude * cos(mode . x)
    shifted_cosine, // shift + amplitude * cos(mode . x)
    box_indicator,  // 1 on the product box [lo, hi], 0 elsewhere
    radial_logspike, // min(|x|^-exponent, cap), |x| measured in [-pi, pi)^d
    custom_grid,    // samples on a uniform grid, periodic multilinear interpolation
    fourier_mode,   // exp(i mode . x); complex valued
};

std::string to_string(Family family);
Family family_from_string(const std::string& name);

struct FunctionParams {
    double value = 1.0;        // constant
    std::vector<int> mode;     // cosine_mode, shifted_cosine, fourier_mode
    double amplitude = 1.0;
    double shift = 0.0;
    std::vector<double> box_lo; // box_indicator, per axis, inside [-pi, pi]
    std::vector<double> box_hi;
    double exponent = 1.0;     // radial_logspike
    double cap = 1e6;
    int grid_resolution = 0;   // custom_grid: points per axis
    std::vector<double> grid_values; // row-major, axis 0 slowest
};

/// A (possibly complex) function on the flat torus [-pi, pi)^d, d in {1, 2, 3}.
///
/// Every function carries an overall real scale factor so that c * f keeps its
/// family (and therefore its closed forms).  Instances are immutable.
class TorusFunction {
public:
    static TorusFunction constant(int d, double value);
    static TorusFunction cosine_mode(int d, std::vector<int> mode, double amplitude = 1.0);
    static TorusFunction shifted_cosine(int d, double shift, std::vector<int> mode, double amplitude = 1.0);
    static TorusFunction box_indicator(int d, std::vector<double> lo, std::vector<double> hi);
    static TorusFunction radial_logspike(int d, double exponent = 1.0, double cap = 1e6);
    static TorusFunction custom_grid(int d, int resolution, std::vector<double> values);
    static TorusFunction fourier_mode(int d, std::vector<int> mode);

    /// Builds a function from a family name and textual key=value parameters
    /// (the CLI and config-file form).  Unknown keys are rejected.
    static TorusFunction from_params(int d, const std::string& family,
                                     const std::map<std::string, std::string>& params);

    [[nodiscard]] int dim() const noexcept { return d_; }
    [[nodiscard]] Family family() const noexcept { return family_; }
    [[nodiscard]] const FunctionParams& params() const noexcept { return params_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }

    [[nodiscard]] TorusFunction scaled(double c) const;

    /// Value at a point; coordinates are wrapped into [-pi, pi).
    [[nodiscard]] std::complex<double> operator()(std::span<const double> x) const;
    /// Value of a radial family at distance r from the origin.
    [[nodiscard]] double radial_value(double r) const;

    [[nodiscard]] bool is_real() const noexcept { return family_ != Family::fourier_mode; }
    [[nodiscard]] bool is_radial_singular() const noexcept { return family_ == Family::radial_logspike; }
    [[nodiscard]] bool is_constant() const noexcept { return family_ == Family::constant; }

    /// Closed-form integral over [-pi, pi)^d when the family has one.
    [[nodiscard]] std::optional<double> exact_integral() const;

    [[nodiscard]] bool has_exact_fourier() const noexcept;
    /// (2 pi)^-d * integral f(x) exp(-i m.x) dx; requires has_exact_fourier().
    [[nodiscard]] std::complex<double> exact_fourier(std::span<const int> m) const;

    /// {"family": ..., "params": {...}} -- the descriptor echoed into reports.
    [[nodiscard]] nlohmann::json describe() const;

private:
    TorusFunction(int d, Family family, FunctionParams params);
    [[nodiscard]] std::complex<double> unscaled(std::span<const double> x) const;

    int d_ = 1;
    Family family_ = Family::constant;
    FunctionParams params_;
    double scale_ = 1.0;
};

/// Integral over [-pi, pi)^d of min(|x|^-p, cap).
double logspike_integral(int d, double exponent, double cap);

} // namespace cif

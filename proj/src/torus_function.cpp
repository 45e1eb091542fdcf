#include "cif/torus_function.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cif/errors.hpp"
#include "cif/gauss.hpp"

namespace cif {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double x) { return x - kTwoPi * std::floor((x + kPi) / kTwoPi); }

void check_dim(int d) {
    if (d < 1 || d > 3) throw UnsupportedDimension("torus dimension must be 1, 2 or 3, got " + std::to_string(d));
}

void check_mode(int d, const std::vector<int>& mode) {
    if (static_cast<int>(mode.size()) != d)
        throw InvalidParameter("mode vector needs " + std::to_string(d) + " components");
}

double dot(std::span<const int> m, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += m[i] * x[i];
    return s;
}

bool same_mode(std::span<const int> a, std::span<const int> b, int sign) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != sign * b[i]) return false;
    return true;
}

bool is_zero_mode(std::span<const int> m) {
    return std::all_of(m.begin(), m.end(), [](int v) { return v == 0; });
}

double parse_number(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    double factor = 1.0;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        factor = kPi;
        s.resize(s.size() - 2);
        if (s.empty() || s == "+") return factor;
        if (s == "-") return -factor;
        if (s.back() == '*') s.pop_back();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidParameter("cannot parse number '" + text + "'");
    }
    if (used != s.size()) throw InvalidParameter("cannot parse number '" + text + "'");
    return v * factor;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_list(text)) {
        if (v != std::round(v)) throw InvalidParameter("mode components must be integers: '" + text + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::vector<int> unit_mode(int d) {
    std::vector<int> m(static_cast<std::size_t>(d), 0);
    m[0] = 1;
    return m;
}

} // namespace

std::string to_string(Family family) {
    switch (family) {
    case Family::constant: return "constant";
    case Family::cosine_mode: return "cosine_mode";
    case Family::shifted_cosine: return "shifted_cosine";
    case Family::box_indicator: return "box_indicator";
    case Family::radial_logspike: return "radial_logspike";
    case Family::custom_grid: return "custom_grid";
    case Family::fourier_mode: return "fourier_mode";
    }
    return "unknown";
}

Family family_from_string(const std::string& name) {
    for (Family f : {Family::constant, Family::cosine_mode, Family::shifted_cosine, Family::box_indicator,
                     Family::radial_logspike, Family::custom_grid, Family::fourier_mode})
        if (to_string(f) == name) return f;
    throw InvalidParameter("unknown function family '" + name + "'");
}

TorusFunction::TorusFunction(int d, Family family, FunctionParams params)
    : d_(d), family_(family), params_(std::move(params)) {
    check_dim(d);
}

TorusFunction TorusFunction::constant(int d, double value) {
    FunctionParams p;
    p.value = value;
    return TorusFunction(d, Family::constant, std::move(p));
}

TorusFunction TorusFunction::cosine_mode(int d, std::vector<int> mode, double amplitude) {
    check_dim(d);
    check_mode(d, mode);
    FunctionParams p;
    p.mode = std::move(mode);
    p.amplitude = amplitude;
    return TorusFunction(d, Family::cosine_mode, std::move(p));
}

TorusFunction TorusFunction::shifted_cosine(int d, double shift, std::vector<int> mode, double amplitude) {
    check_dim(d);
    check_mode(d, mode);
    FunctionParams p;
    p.shift = shift;
    p.mode = std::move(mode);
    p.amplitude = amplitude;
    return TorusFunction(d, Family::shifted_cosine, std::move(p));
}

TorusFunction TorusFunction::box_indicator(int d, std::vector<double> lo, std::vector<double> hi) {
    check_dim(d);
    if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d)
        throw InvalidParameter("box bounds need one value per axis");
    for (int i = 0; i < d; ++i) {
        if (!(lo[i] >= -kPi && hi[i] <= kPi && lo[i] < hi[i]))
            throw InvalidParameter("box bounds must satisfy -pi <= lo < hi <= pi");
    }
    FunctionParams p;
    p.box_lo = std::move(lo);
    p.box_hi = std::move(hi);
    return TorusFunction(d, Family::box_indicator, std::move(p));
}

TorusFunction TorusFunction::radial_logspike(int d, double exponent, double cap) {
    check_dim(d);
    if (!(exponent > 0.0) || !(cap > 1.0) || !std::isfinite(cap))
        throw InvalidParameter("radial_logspike needs exponent > 0 and a finite cap > 1");
    FunctionParams p;
    p.exponent = exponent;
    p.cap = cap;
    return TorusFunction(d, Family::radial_logspike, std::move(p));
}

TorusFunction TorusFunction::custom_grid(int d, int resolution, std::vector<double> values) {
    check_dim(d);
    if (resolution < 1) throw InvalidParameter("custom_grid resolution must be positive");
    std::size_t expected = 1;
    for (int i = 0; i < d; ++i) expected *= static_cast<std::size_t>(resolution);
    if (values.size() != expected)
        throw InvalidParameter("custom_grid expects " + std::to_string(expected) + " samples, got " +
                               std::to_string(values.size()));
    FunctionParams p;
    p.grid_resolution = resolution;
    p.grid_values = std::move(values);
    return TorusFunction(d, Family::custom_grid, std::move(p));
}

TorusFunction TorusFunction::fourier_mode(int d, std::vector<int> mode) {
    check_dim(d);
    check_mode(d, mode);
    FunctionParams p;
    p.mode = std::move(mode);
    return TorusFunction(d, Family::fourier_mode, std::move(p));
}

TorusFunction TorusFunction::from_params(int d, const std::string& family,
                                         const std::map<std::string, std::string>& params) {
    const Family fam = family_from_string(family);
    std::map<std::string, std::string> rest = params;
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = rest.find(key);
        if (it == rest.end()) return std::nullopt;
        std::string v = it->second;
        rest.erase(it);
        return v;
    };
    auto number = [&](const std::string& key, double fallback) {
        auto v = take(key);
        return v ? parse_number(*v) : fallback;
    };
    auto numbers = [&](const std::string& key, std::vector<double> fallback) {
        auto v = take(key);
        return v ? parse_list(*v) : fallback;
    };
    auto mode = [&]() {
        auto v = take("mode");
        return v ? parse_int_list(*v) : unit_mode(d);
    };
    check_dim(d);
    const double scale = number("scale", 1.0);

    std::optional<TorusFunction> f;
    switch (fam) {
    case Family::constant: f = constant(d, number("value", 1.0)); break;
    case Family::cosine_mode: {
        auto m = mode();
        f = cosine_mode(d, std::move(m), number("amplitude", 1.0));
        break;
    }
    case Family::shifted_cosine: {
        const double shift = number("shift", 0.0);
        auto m = mode();
        f = shifted_cosine(d, shift, std::move(m), number("amplitude", 1.0));
        break;
    }
    case Family::box_indicator: {
        auto lo = numbers("lo", std::vector<double>(static_cast<std::size_t>(d), 0.0));
        auto hi = numbers("hi", std::vector<double>(static_cast<std::size_t>(d), kPi));
        f = box_indicator(d, std::move(lo), std::move(hi));
        break;
    }
    case Family::radial_logspike: {
        const double exponent = number("exponent", 1.0);
        f = radial_logspike(d, exponent, number("cap", 1e6));
        break;
    }
    case Family::custom_grid: {
        std::vector<double> values;
        if (auto file = take("file")) {
            std::ifstream in(*file);
            if (!in) throw InvalidParameter("cannot open custom_grid file '" + *file + "'");
            std::string token;
            // non-finite entries ("nan", "inf") are accepted here and rejected on sampling
            while (in >> token) values.push_back(std::strtod(token.c_str(), nullptr));
        } else if (auto list = take("values")) {
            std::stringstream ss(*list);
            std::string item;
            while (std::getline(ss, item, ',')) values.push_back(std::strtod(item.c_str(), nullptr));
        } else {
            throw InvalidParameter("custom_grid needs file=PATH or values=v0,v1,...");
        }
        const double root = std::pow(static_cast<double>(values.size()), 1.0 / d);
        const int res = static_cast<int>(number("resolution", static_cast<double>(std::lround(root))));
        f = custom_grid(d, res, std::move(values));
        break;
    }
    case Family::fourier_mode: f = fourier_mode(d, mode()); break;
    }
    if (!rest.empty()) throw InvalidParameter("unknown parameter '" + rest.begin()->first + "' for " + family);
    return f->scaled(scale);
}

TorusFunction TorusFunction::scaled(double c) const {
    if (!std::isfinite(c)) throw InvalidParameter("scale factor must be finite");
    TorusFunction g = *this;
    g.scale_ *= c;
    return g;
}

double TorusFunction::radial_value(double r) const {
    if (family_ != Family::radial_logspike) throw ContractViolation("radial_value on a non-radial family");
    if (r <= 0.0) return scale_ * params_.cap;
    return scale_ * std::min(std::pow(r, -params_.exponent), params_.cap);
}

std::complex<double> TorusFunction::operator()(std::span<const double> x) const {
    return scale_ * unscaled(x);
}

std::complex<double> TorusFunction::unscaled(std::span<const double> x) const {
    switch (family_) {
    case Family::constant: return params_.value;
    case Family::cosine_mode: return params_.amplitude * std::cos(dot(params_.mode, x));
    case Family::shifted_cosine: return params_.shift + params_.amplitude * std::cos(dot(params_.mode, x));
    case Family::fourier_mode: return std::polar(1.0, dot(params_.mode, x));
    case Family::box_indicator: {
        for (int i = 0; i < d_; ++i) {
            const double xi = wrap(x[static_cast<std::size_t>(i)]);
            if (xi < params_.box_lo[static_cast<std::size_t>(i)] || xi > params_.box_hi[static_cast<std::size_t>(i)])
                return 0.0;
        }
        return 1.0;
    }
    case Family::radial_logspike: {
        double r2 = 0.0;
        for (int i = 0; i < d_; ++i) {
            const double xi = wrap(x[static_cast<std::size_t>(i)]);
            r2 += xi * xi;
        }
        if (r2 == 0.0) return params_.cap;
        return std::min(std::pow(r2, -0.5 * params_.exponent), params_.cap);
    }
    case Family::custom_grid: {
        const int n = params_.grid_resolution;
        const double h = kTwoPi / n;
        std::size_t base[3] = {0, 0, 0};
        std::size_t next[3] = {0, 0, 0};
        double frac[3] = {0.0, 0.0, 0.0};
        for (int i = 0; i < d_; ++i) {
            const double u = (wrap(x[static_cast<std::size_t>(i)]) + kPi) / h;
            const double fl = std::floor(u);
            frac[i] = u - fl;
            const auto j = static_cast<long>(fl) % n;
            base[i] = static_cast<std::size_t>(j);
            next[i] = static_cast<std::size_t>((j + 1) % n);
        }
        double acc = 0.0;
        const std::size_t corners = std::size_t{1} << d_;
        for (std::size_t c = 0; c < corners; ++c) {
            double w = 1.0;
            std::size_t idx = 0;
            for (int i = 0; i < d_; ++i) {
                const bool up = (c >> i) & 1U;
                w *= up ? frac[i] : 1.0 - frac[i];
                idx = idx * static_cast<std::size_t>(n) + (up ? next[i] : base[i]);
            }
            if (w != 0.0) acc += w * params_.grid_values[idx];
        }
        return acc;
    }
    }
    return 0.0;
}

std::optional<double> TorusFunction::exact_integral() const {
    const double volume = std::pow(kTwoPi, d_);
    switch (family_) {
    case Family::constant: return scale_ * params_.value * volume;
    case Family::cosine_mode:
        return is_zero_mode(params_.mode) ? scale_ * params_.amplitude * volume : 0.0;
    case Family::shifted_cosine:
        return scale_ * (params_.shift + (is_zero_mode(params_.mode) ? params_.amplitude : 0.0)) * volume;
    case Family::box_indicator: {
        double v = scale_;
        for (int i = 0; i < d_; ++i) v *= params_.box_hi[static_cast<std::size_t>(i)] - params_.box_lo[static_cast<std::size_t>(i)];
        return v;
    }
    case Family::radial_logspike: return scale_ * logspike_integral(d_, params_.exponent, params_.cap);
    case Family::custom_grid:
    case Family::fourier_mode: return std::nullopt;
    }
    return std::nullopt;
}

bool TorusFunction::has_exact_fourier() const noexcept {
    switch (family_) {
    case Family::constant:
    case Family::cosine_mode:
    case Family::shifted_cosine:
    case Family::box_indicator:
    case Family::fourier_mode: return true;
    case Family::radial_logspike:
    case Family::custom_grid: return false;
    }
    return false;
}

std::complex<double> TorusFunction::exact_fourier(std::span<const int> m) const {
    if (!has_exact_fourier()) throw ContractViolation(to_string(family_) + " has no closed-form Fourier coefficients");
    if (static_cast<int>(m.size()) != d_) throw InvalidParameter("frequency has wrong dimension");
    const bool zero = is_zero_mode(m);
    auto cosine_part = [&](double amplitude) -> std::complex<double> {
        if (is_zero_mode(params_.mode)) return zero ? amplitude : 0.0;
        double c = 0.0;
        if (same_mode(m, params_.mode, 1)) c += 0.5 * amplitude;
        if (same_mode(m, params_.mode, -1)) c += 0.5 * amplitude;
        return c;
    };
    switch (family_) {
    case Family::constant: return zero ? scale_ * params_.value : 0.0;
    case Family::cosine_mode: return scale_ * cosine_part(params_.amplitude);
    case Family::shifted_cosine: return scale_ * ((zero ? params_.shift : 0.0) + cosine_part(params_.amplitude));
    case Family::fourier_mode: return same_mode(m, params_.mode, 1) ? scale_ : 0.0;
    case Family::box_indicator: {
        std::complex<double> c = scale_;
        for (int i = 0; i < d_; ++i) {
            const double lo = params_.box_lo[static_cast<std::size_t>(i)];
            const double hi = params_.box_hi[static_cast<std::size_t>(i)];
            const int mi = m[static_cast<std::size_t>(i)];
            if (mi == 0) {
                c *= (hi - lo) / kTwoPi;
            } else {
                const std::complex<double> num = std::polar(1.0, -mi * lo) - std::polar(1.0, -mi * hi);
                c *= num / std::complex<double>(0.0, kTwoPi * mi);
            }
        }
        return c;
    }
    default: break;
    }
    return 0.0;
}

nlohmann::json TorusFunction::describe() const {
    nlohmann::json p = nlohmann::json::object();
    switch (family_) {
    case Family::constant: p["value"] = params_.value; break;
    case Family::cosine_mode:
        p["mode"] = params_.mode;
        p["amplitude"] = params_.amplitude;
        break;
    case Family::shifted_cosine:
        p["shift"] = params_.shift;
        p["mode"] = params_.mode;
        p["amplitude"] = params_.amplitude;
        break;
    case Family::box_indicator:
        p["lo"] = params_.box_lo;
        p["hi"] = params_.box_hi;
        break;
    case Family::radial_logspike:
        p["exponent"] = params_.exponent;
        p["cap"] = params_.cap;
        break;
    case Family::custom_grid: p["resolution"] = params_.grid_resolution; break;
    case Family::fourier_mode: p["mode"] = params_.mode; break;
    }
    p["scale"] = scale_;
    return {{"family", to_string(family_)}, {"d", d_}, {"params", p}};
}

double logspike_integral(int d, double exponent, double cap) {
    check_dim(d);
    if (!(exponent < d)) throw InvalidParameter("|x|^-p is integrable on T^d only for p < d");
    // Split the cube into 2d pyramids with apex at the origin; along each ray the
    // radial integral is explicit, leaving a smooth integral over one face.
    const double p = exponent;
    const auto rule = gauss_legendre(64);
    double face = 0.0;
    if (d == 1) {
        face = std::pow(kPi * kPi, -0.5 * p);
    } else {
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double u = kPi * rule.nodes[i];
            if (d == 2) {
                face += kPi * rule.weights[i] * std::pow(u * u + kPi * kPi, -0.5 * p);
            } else {
                for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                    const double v = kPi * rule.nodes[j];
                    face += kPi * kPi * rule.weights[i] * rule.weights[j] * std::pow(u * u + v * v + kPi * kPi, -0.5 * p);
                }
            }
        }
    }
    const double uncapped = 2.0 * d * kPi / (d - p) * face;
    // Inside r_c = cap^{-1/p} the function equals cap instead of r^-p.
    const double rc = std::pow(cap, -1.0 / p);
    const double sphere = d == 1 ? 2.0 : (d == 2 ? kTwoPi : 4.0 * kPi);
    const double excess = sphere * (std::pow(rc, d - p) / (d - p) - cap * std::pow(rc, d) / d);
    return uncapped - excess;
}

} // namespace cif

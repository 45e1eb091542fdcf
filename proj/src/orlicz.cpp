#include "cif/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cif/errors.hpp"

namespace cif {

namespace {

constexpr double kLambdaRelTol = 1e-13;
constexpr double kDivergenceGrowth = 0.05;
constexpr double kConvergenceBand = 0.01;

std::vector<double> abs_samples(const std::vector<std::complex<double>>& values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InvalidFunction("function has a non-finite sample");
        out.push_back(std::abs(v));
    }
    return out;
}

MembershipVerdict classify(const std::vector<double>& ladder) {
    MembershipVerdict v;
    const double prev = ladder[ladder.size() - 2];
    const double last = ladder.back();
    v.top_growth = prev > 0.0 ? last / prev - 1.0 : (last > 0.0 ? INFINITY : 0.0);
    if (v.top_growth > kDivergenceGrowth) {
        v.status = "diverging";
    } else if (std::abs(v.top_growth) <= kConvergenceBand) {
        v.status = "converging";
        v.member = true;
    } else {
        v.status = "inconclusive";
    }
    return v;
}

} // namespace

double orlicz_young(double t) { return t * std::log(std::numbers::e + t); }

double orlicz_modular(std::span<const double> abs_values, std::span<const double> weights, double lambda) {
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t i = 0; i < abs_values.size(); ++i) {
        if (weights[i] == 0.0 || abs_values[i] == 0.0) continue;
        const double y = weights[i] * orlicz_young(abs_values[i] / lambda) - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double luxemburg_norm(std::span<const double> abs_values, std::span<const double> weights) {
    if (abs_values.size() != weights.size()) throw InvalidParameter("values and weights differ in length");
    double peak = 0.0;
    for (double a : abs_values) {
        if (!std::isfinite(a) || a < 0.0) throw InvalidFunction("Luxemburg norm needs finite nonnegative samples");
        peak = std::max(peak, a);
    }
    bool any = false;
    for (std::size_t i = 0; i < abs_values.size(); ++i) any = any || (abs_values[i] > 0.0 && weights[i] > 0.0);
    if (!any) return 0.0;

    // The modular is strictly decreasing in lambda: bracket, then bisect.
    double hi = peak;
    while (orlicz_modular(abs_values, weights, hi) > 1.0) hi *= 2.0;
    double lo = hi;
    while (orlicz_modular(abs_values, weights, lo) <= 1.0) lo *= 0.5;
    while (hi - lo > kLambdaRelTol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (orlicz_modular(abs_values, weights, mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

double orlicz_norm(const TorusFunction& f, const QuadratureGrid& grid) {
    const auto a = abs_samples(grid.sample(f));
    const auto w = grid.weights();
    return luxemburg_norm(a, w);
}

double orlicz2_norm(const TorusFunction& f, const QuadratureGrid& grid) {
    auto a = abs_samples(grid.sample(f));
    for (double& v : a) v *= v;
    const auto w = grid.weights();
    return std::sqrt(luxemburg_norm(a, w));
}

double lebesgue_norm(const TorusFunction& f, const QuadratureGrid& grid, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidParameter("Lebesgue exponent must satisfy p >= 1");
    auto a = abs_samples(grid.sample(f));
    for (double& v : a) v = std::pow(v, p);
    return std::pow(weighted_sum(a, grid.weights()), 1.0 / p);
}

SignedIntegrals signed_integrals(const TorusFunction& f, const QuadratureGrid& grid) {
    if (!f.is_real()) throw InvalidFunction("signed integrals need a real-valued function");
    const auto values = grid.sample(f);
    std::vector<double> pos;
    std::vector<double> neg;
    pos.reserve(values.size());
    neg.reserve(values.size());
    for (const auto& v : values) {
        if (!std::isfinite(v.real())) throw InvalidFunction("function has a non-finite sample");
        pos.push_back(std::max(v.real(), 0.0));
        neg.push_back(std::max(-v.real(), 0.0));
    }
    const auto w = grid.weights();
    SignedIntegrals s;
    s.positive = weighted_sum(pos, w);
    s.negative = weighted_sum(neg, w);
    s.total = s.positive - s.negative;
    return s;
}

std::vector<int> membership_ladder(int d) {
    if (d == 3) return {32, 64, 128, 256};
    return {128, 256, 512, 1024};
}

MembershipReport membership_report(const TorusFunction& f) {
    MembershipReport report;
    report.function = f.describe();
    const double cap = f.family() == Family::radial_logspike ? std::abs(f.scale()) * f.params().cap : 0.0;
    report.cap = cap;

    std::vector<double> l2s;
    std::vector<double> lms;
    for (int res : membership_ladder(f.dim())) {
        const auto grid = QuadratureGrid::uniform(f.dim(), res);
        auto a = abs_samples(grid.sample(f));
        auto w = grid.weights();
        if (cap > 0.0) {
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i] >= cap) w[i] = 0.0;
        }
        std::vector<double> sq(a);
        for (double& v : sq) v *= v;
        LadderRung rung;
        rung.resolution = res;
        rung.l2 = std::sqrt(weighted_sum(sq, w));
        rung.lm = luxemburg_norm(a, w);
        report.ladder.push_back(rung);
        l2s.push_back(rung.l2);
        lms.push_back(rung.lm);
    }
    report.l2 = classify(l2s);
    report.lm = classify(lms);
    return report;
}

nlohmann::json to_json(const MembershipReport& report) {
    nlohmann::json ladder = nlohmann::json::array();
    for (const auto& r : report.ladder) ladder.push_back({{"res", r.resolution}, {"l2", r.l2}, {"lm", r.lm}});
    auto verdict = [](const MembershipVerdict& v) {
        return nlohmann::json{{"member", v.member}, {"status", v.status}, {"top_growth", v.top_growth}};
    };
    return {{"family", report.function.at("family")},
            {"params", report.function.at("params")},
            {"d", report.function.at("d")},
            {"ladder", ladder},
            {"verdict_l2", verdict(report.l2)},
            {"verdict_lm", verdict(report.lm)},
            {"cap", report.cap},
            {"conventions", {{"orlicz", kOrliczConvention}, {"quadrature", "trapezoidal, capped nodes excluded"}}}};
}

} // namespace cif

#include "cif/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#include "cif/errors.hpp"
#include "cif/orlicz.hpp"
#include "cif/quadrature.hpp"
#include "cif/torusop.hpp"

namespace cif {

namespace {

using nlohmann::json;

std::string format_cutoff(double r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

void check_schedule(const std::vector<double>& schedule, std::size_t min_size) {
    if (schedule.size() < min_size)
        throw InvalidParameter("schedule needs at least " + std::to_string(min_size) + " cutoffs");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0) || !std::isfinite(schedule[i]))
            throw InvalidParameter("cutoffs must be positive and finite");
        if (i > 0 && !(schedule[i] > schedule[i - 1]))
            throw InvalidParameter("schedule must be strictly increasing");
    }
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; the first failure (in
// index order) is rethrown after all workers finish.
void run_indexed(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(n);
    auto guarded = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(n, 1))));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) guarded(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) guarded(i);
            });
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

PartEstimate estimate_part(const SingularValueSeq& part, std::size_t fit_length) {
    PartEstimate out;
    out.count = part.size();
    out.fit_length = std::min(fit_length, part.size());
    if (out.fit_length < kMinEstimatorLength) {
        out.finite_rank = true;
        out.estimate.alpha_hat = 0.0;
    } else {
        out.estimate = limit_estimator(part.prefix(out.fit_length));
    }
    for (std::size_t k = 0; k < out.fit_length; ++k)
        out.max_tail = std::max(out.max_tail, static_cast<double>(k + 1) * part[k]);
    return out;
}

SignedParts split_with_zero_tol(std::vector<double> eigs) {
    double peak = 0.0;
    for (double v : eigs) peak = std::max(peak, std::abs(v));
    const double floor = kZeroEigenTol * peak;
    for (double& v : eigs)
        if (std::abs(v) <= floor) v = 0.0;
    return pos_neg_split(eigs);
}

// Spectrum of P W c W P for constant c: c (1 + |k|^2)^{-d/2} over the basis.
std::vector<double> diagonal_spectrum(double c, const LatticeBasis& basis) {
    auto w = basis.bessel_weights(static_cast<double>(basis.dim()) / 2.0);
    for (double& v : w) v *= c;
    return w;
}

double default_tolerance(const TorusFunction& f, int d, bool fast_path) {
    if (fast_path) return kToleranceDiagonal;
    if (f.is_radial_singular()) return kToleranceSingular;
    return d == 1 ? kToleranceMatrix1d : kToleranceMatrix2d;
}

int default_resolution(int d) { return d >= 3 ? 128 : 1024; }

json part_json(const PartEstimate& p) {
    json j = to_json(p.estimate);
    j["count"] = p.count;
    j["fit_length"] = p.fit_length;
    j["finite_rank"] = p.finite_rank;
    j["max_tail"] = p.max_tail;
    return j;
}

} // namespace

double weyl_constant(int d) {
    constexpr double pi = std::numbers::pi;
    switch (d) {
    case 1: return 1.0 / pi;
    case 2: return 1.0 / (4.0 * pi);
    case 3: return 1.0 / (6.0 * pi * pi);
    default: throw UnsupportedDimension("weyl_constant: d must be 1, 2 or 3, got " + std::to_string(d));
    }
}

bool within_tolerance(double extrapolated, double target, double tolerance) {
    return std::abs(extrapolated - target) <= tolerance * std::max(target, 0.05);
}

Extrapolation extrapolate_rungs(const std::vector<double>& cutoffs, const std::vector<double>& estimates) {
    if (cutoffs.size() != estimates.size() || estimates.empty())
        throw InvalidParameter("extrapolation needs one estimate per cutoff");
    const std::size_t n = estimates.size();
    Extrapolation out{estimates.back(), false};
    if (n < 3) return out;

    const double e1 = estimates[n - 3], e2 = estimates[n - 2], e3 = estimates[n - 1];
    const double d1 = e2 - e1, d2 = e3 - e2;
    const bool monotone = (d1 > 0.0 && d2 > 0.0) || (d1 < 0.0 && d2 < 0.0);
    if (!monotone) return out;

    const double x1 = 1.0 / cutoffs[n - 3], x2 = 1.0 / cutoffs[n - 2], x3 = 1.0 / cutoffs[n - 1];
    const double predicted = (x2 - x3) / (x1 - x2);
    if (d2 / d1 > predicted) return out;

    out.value = (x2 * e3 - x3 * e2) / (x2 - x3);
    out.richardson = true;
    return out;
}

CifReport cif_check(const TorusFunction& f, const std::vector<double>& schedule, const CifOptions& options) {
    if (!f.is_real()) throw InvalidFunction("cif_check requires a real-valued function");
    check_schedule(schedule, 3);
    if (!(options.spectral_fraction > 0.0 && options.spectral_fraction <= 1.0))
        throw InvalidParameter("spectral_fraction must lie in (0, 1]");
    if (options.tolerance < 0.0) throw InvalidParameter("tolerance must be nonnegative");

    const int d = f.dim();
    CifReport report;
    report.function = f.describe();
    report.d = d;
    report.schedule = schedule;
    report.options = options;
    report.fast_path = options.fast_diagonal && f.is_constant();
    report.tolerance = options.tolerance > 0.0 ? options.tolerance : default_tolerance(f, d, report.fast_path);

    const int res = options.quadrature_resolution > 0 ? options.quadrature_resolution : default_resolution(d);
    const auto integrals = signed_integrals(f, QuadratureGrid::for_function(f, res));
    report.integral_pos = integrals.positive;
    report.integral_neg = integrals.negative;
    report.target_pos = weyl_constant(d) * integrals.positive;
    report.target_neg = weyl_constant(d) * integrals.negative;

    report.rungs.resize(schedule.size());
    run_indexed(schedule.size(), options.jobs, [&](std::size_t i) {
        const double r = schedule[i];
        try {
            const LatticeBasis basis(d, r);
            std::vector<double> eigs;
            if (report.fast_path) {
                eigs = diagonal_spectrum(f.scale() * f.params().value, basis);
            } else {
                eigs = eig_hermitian(build_symmetric(f, basis, options.oversample));
            }
            const auto parts = split_with_zero_tol(std::move(eigs));
            const std::size_t fit =
                report.fast_path ? basis.size()
                                 : static_cast<std::size_t>(options.spectral_fraction * static_cast<double>(basis.size()));
            CifRung& rung = report.rungs[i];
            rung.cutoff = r;
            rung.dim = basis.size();
            rung.positive = estimate_part(parts.positive, fit);
            rung.negative = estimate_part(parts.negative, fit);
            if (options.keep_spectra) {
                rung.positive_spectrum = parts.positive;
                rung.negative_spectrum = parts.negative;
            }
            if (i + 1 == schedule.size()) {
                if (parts.positive.size() >= 2) report.dixmier_pos = dixmier_logmean(parts.positive, parts.positive.size());
                if (parts.negative.size() >= 2) report.dixmier_neg = dixmier_logmean(parts.negative, parts.negative.size());
            }
        } catch (const std::exception& e) {
            throw BuildFailure("cutoff R = " + format_cutoff(r) + ": " + e.what());
        }
    });

    std::vector<double> pos, neg;
    for (const auto& rung : report.rungs) {
        pos.push_back(rung.positive.estimate.alpha_hat);
        neg.push_back(rung.negative.estimate.alpha_hat);
    }
    report.extrapolated_pos = extrapolate_rungs(schedule, pos);
    report.extrapolated_neg = extrapolate_rungs(schedule, neg);
    report.verdict_pos = within_tolerance(report.extrapolated_pos.value, report.target_pos, report.tolerance);
    report.verdict_neg = within_tolerance(report.extrapolated_neg.value, report.target_neg, report.tolerance);
    return report;
}

json to_json(const CifReport& report) {
    json rungs = json::array();
    for (const auto& r : report.rungs) {
        rungs.push_back({{"R", r.cutoff},
                         {"dim", r.dim},
                         {"est_pos", r.positive.estimate.alpha_hat},
                         {"est_neg", r.negative.estimate.alpha_hat},
                         {"residuals", {{"pos", r.positive.estimate.residual}, {"neg", r.negative.estimate.residual}}},
                         {"positive", part_json(r.positive)},
                         {"negative", part_json(r.negative)}});
    }
    const auto& o = report.options;
    return {
        {"f", report.function},
        {"d", report.d},
        {"schedule", report.schedule},
        {"fast_path", report.fast_path},
        {"rungs", rungs},
        {"integrals", {{"pos", report.integral_pos}, {"neg", report.integral_neg}}},
        {"targets", {{"pos", report.target_pos}, {"neg", report.target_neg}, {"weyl_constant", weyl_constant(report.d)}}},
        {"extrapolated",
         {{"pos", report.extrapolated_pos.value},
          {"neg", report.extrapolated_neg.value},
          {"richardson_pos", report.extrapolated_pos.richardson},
          {"richardson_neg", report.extrapolated_neg.richardson}}},
        {"dixmier_logmean", {{"pos", report.dixmier_pos}, {"neg", report.dixmier_neg}}},
        {"verdicts", {{"pos", report.verdict_pos}, {"neg", report.verdict_neg}, {"pass", report.pass()}}},
        {"tolerances", {{"relative", report.tolerance}, {"floor", 0.05}}},
        {"conventions",
         {{"operator", "P (1-Lap)^{-d/4} M_f (1-Lap)^{-d/4} P, P onto span{exp(ik.x) : |k| <= R}"},
          {"index", "n = k + 1 (right end point of the k-th step)"},
          {"estimator", "least squares (k + 1) mu(k) ~ alpha + beta / ln(k + 2), k from 0, on [len/2, len-10) of the fitted prefix"},
          {"spectral_fraction", report.fast_path ? 1.0 : o.spectral_fraction},
          {"extrapolation", "last rung; one Richardson step in 1/R when the last three rungs are monotone and "
                            "contract at least as fast as the 1/R model"},
          {"zero_eigenvalue_tolerance", kZeroEigenTol},
          {"oversample", o.oversample},
          {"quadrature_resolution",
           o.quadrature_resolution > 0 ? o.quadrature_resolution : default_resolution(report.d)},
          {"orlicz", kOrliczConvention}}},
    };
}

// ------------------------------------------------------------- Cwikel probe

CwikelReport cwikel_probe(const TorusFunction& f, const std::vector<double>& schedule, int oversample) {
    check_schedule(schedule, 1);
    CwikelReport report;
    report.function = f.describe();
    report.orlicz2 = orlicz2_norm(f, QuadratureGrid::for_function(f, default_resolution(f.dim())));
    if (!(report.orlicz2 > 0.0)) throw InvalidFunction("cwikel_probe: ||f||_{L_M^(2)} vanishes");
    for (double r : schedule) {
        const LatticeBasis basis(f.dim(), r);
        const double weak = weak_quasinorm(singvals(build_weighted(f, basis, oversample)), 2.0);
        CwikelRow row{r, basis.size(), weak, weak / report.orlicz2};
        report.max_ratio = std::max(report.max_ratio, row.ratio);
        report.rows.push_back(row);
    }
    return report;
}

json to_json(const CwikelReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"R", r.cutoff}, {"dim", r.dim}, {"weak_norm", r.weak_norm}, {"ratio", r.ratio}});
    return {{"f", report.function},
            {"orlicz2_norm", report.orlicz2},
            {"rows", rows},
            {"max_ratio", report.max_ratio},
            {"conventions", {{"ratio", kCwikelConvention}, {"orlicz", kOrliczConvention}}}};
}

// ------------------------------------------------------ L_2 blow-up contrast

BlowupReport l2_blowup_probe(int d, double cap, const std::vector<double>& schedule, const CifOptions& options) {
    if (d != 2) throw UnsupportedDimension("l2_blowup_probe is defined for d = 2 only");
    check_schedule(schedule, 3);
    const auto spike = TorusFunction::radial_logspike(d, 1.0, cap);
    const auto one = TorusFunction::constant(d, 1.0);

    BlowupReport report;
    report.cap = cap;
    report.tolerance = options.tolerance > 0.0 ? options.tolerance : kToleranceSingular;

    CifOptions sym = options;
    sym.tolerance = report.tolerance;
    const auto cif = cif_check(spike, schedule, sym);
    report.target = cif.target_pos;
    report.extrapolated = cif.extrapolated_pos.value;
    report.symmetric_ok = within_tolerance(report.extrapolated, report.target, report.tolerance);

    report.hs_blowup = true;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const LatticeBasis basis(d, schedule[i]);
        BlowupRow row;
        row.cutoff = schedule[i];
        row.dim = basis.size();
        row.hs_spike = hs_norm(build_asymmetric(spike, basis, options.oversample));
        row.hs_constant = hs_norm(build_asymmetric(one, basis, options.oversample));
        row.est_pos = cif.rungs[i].positive.estimate.alpha_hat;
        if (i > 0) {
            row.hs_growth = row.hs_spike / report.rows.back().hs_spike - 1.0;
            if (!(row.hs_growth >= report.min_growth_required)) report.hs_blowup = false;
        }
        report.rows.push_back(row);
    }
    return report;
}

json to_json(const BlowupReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"R", r.cutoff},
                        {"dim", r.dim},
                        {"hs_spike", r.hs_spike},
                        {"hs_growth", r.hs_growth},
                        {"hs_constant", r.hs_constant},
                        {"est_pos", r.est_pos}});
    return {{"f", {{"family", "radial_logspike"}, {"exponent", 1.0}, {"cap", report.cap}, {"d", 2}}},
            {"rows", rows},
            {"target", report.target},
            {"extrapolated", report.extrapolated},
            {"thresholds", {{"min_hs_growth", report.min_growth_required}, {"relative_tolerance", report.tolerance}}},
            {"verdicts",
             {{"hs_blowup", report.hs_blowup},
              {"symmetric_ok", report.symmetric_ok},
              {"pass", report.hs_blowup && report.symmetric_ok}}},
            {"conventions",
             {{"hs", "Frobenius norm of P M_f (1-Lap)^{-1} P"},
              {"growth", "hs(R_i) / hs(R_{i-1}) - 1"}}}};
}

} // namespace cif

#include "cif/lemmalab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "cif/errors.hpp"
#include "cif/linalg.hpp"
#include "cif/torusop.hpp"

namespace cif {

namespace {

using nlohmann::json;

constexpr double kProductSlack = 1e-10;
constexpr double kHolderMaxRatio = 10.0;
constexpr double kHolderGrowthFactor = 2.0;
constexpr double kTensorTol = 0.02;
constexpr double kDirectSumTol = 0.03;
constexpr double kPerturbationTol = 0.02;
constexpr double kTransferTol = 0.02;
constexpr double kCommutationDecay = 0.8; // value must fall to at most 80% per rung
constexpr double kCommutationZeroTol = 1e-9;
constexpr double kExactTol = 1e-12;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

Eigen::MatrixXcd gaussian_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd g(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = {re, im};
        }
    return g / std::sqrt(2.0 * n);
}

Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gaussian_matrix(n, rng));
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

Eigen::MatrixXcd random_hermitian(int n, TrialDistribution dist, std::mt19937_64& rng) {
    if (dist == TrialDistribution::prescribed_profile) {
        std::bernoulli_distribution coin(0.5);
        Eigen::VectorXd diag(n);
        for (int k = 0; k < n; ++k) diag(k) = (coin(rng) ? 1.0 : -1.0) / (k + 1.0);
        const auto u = random_unitary(n, rng);
        Eigen::MatrixXcd h = u * diag.asDiagonal() * u.adjoint();
        return 0.5 * (h + h.adjoint());
    }
    const auto g = gaussian_matrix(n, rng);
    return 0.5 * (g + g.adjoint());
}

SingularValueSeq mu_hermitian(const Eigen::MatrixXcd& a) { return mu_from_eigs(hermitian_eigenvalues(a)); }

double weak1(const Eigen::MatrixXcd& hermitian) { return weak_quasinorm(mu_hermitian(hermitian), 1.0); }

Eigen::MatrixXcd sqrt_positive_part(const Eigen::MatrixXcd& a) {
    const auto eig = hermitian_eigensystem(a);
    Eigen::VectorXd lam(a.rows());
    for (Eigen::Index j = 0; j < a.rows(); ++j)
        lam(j) = std::sqrt(std::max(eig.values[static_cast<std::size_t>(j)], 0.0));
    Eigen::MatrixXcd out = eig.vectors * lam.asDiagonal() * eig.vectors.adjoint();
    return 0.5 * (out + out.adjoint());
}

// max_K sum_{k<K} mu(k, X)^{1/2} / sum_{k<K} mu(k, Y)^{1/4}
double partial_sum_ratio(const SingularValueSeq& x, const SingularValueSeq& y) {
    double sx = 0.0, sy = 0.0, worst = 0.0;
    const std::size_t n = std::max(x.size(), y.size());
    for (std::size_t k = 0; k < n; ++k) {
        sx += std::sqrt(x.at_or_zero(k));
        sy += std::pow(y.at_or_zero(k), 0.25);
        if (sy > 0.0) worst = std::max(worst, sx / sy);
    }
    return worst;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Largest elementwise relative difference; infinity on a length mismatch.
double sequence_gap(const SingularValueSeq& a, const SingularValueSeq& b) {
    if (a.size() != b.size()) return HUGE_VAL;
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        worst = std::max(worst, std::abs(a[k] - b[k]) / std::max(std::abs(b[k]), 1e-300));
    return worst;
}

SingularValueSeq sorted_seq(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<>{});
    return SingularValueSeq(std::move(v));
}

double estimate(const SingularValueSeq& seq) { return limit_estimator(seq).alpha_hat; }

} // namespace

json to_json(const LemmaVerdict& v) {
    return {{"test", v.test},       {"seed", v.seed}, {"trials", v.trials}, {"worst_case", v.worst_case},
            {"threshold", v.threshold}, {"pass", v.pass}, {"details", v.details}};
}

LemmaVerdict product_inequality_test(const TrialConfig& cfg) {
    LemmaVerdict out{"product_inequality", cfg.seed, cfg.trials, -HUGE_VAL, kProductSlack, true, json::object()};
    json per_size = json::array();
    int violations = 0;
    for (int n : cfg.sizes) {
        auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(n));
        double worst = -HUGE_VAL;
        for (int t = 0; t < cfg.trials; ++t) {
            const auto a = gaussian_matrix(n, rng);
            const auto b = gaussian_matrix(n, rng);
            const auto sa = singular_values(a);
            const auto sb = singular_values(b);
            const auto sab = singular_values(a * b);
            for (std::size_t k = 0; 2 * k < sab.size(); ++k) {
                const double slack = sab[2 * k] - sa[k] * sb[k];
                worst = std::max(worst, slack);
                if (slack > kProductSlack) ++violations;
            }
        }
        per_size.push_back({{"size", n}, {"worst_slack", worst}});
        out.worst_case = std::max(out.worst_case, worst);
    }
    out.pass = violations == 0;
    out.details = {{"per_size", per_size}, {"violations", violations}};
    return out;
}

double holder_ratio(const Eigen::MatrixXcd& t, const Eigen::MatrixXcd& s) {
    const double lhs = weak1(positive_part(t) - positive_part(s));
    if (lhs == 0.0) return 0.0;
    const double diff = weak1(t - s);
    const double rhs = std::sqrt(diff) * std::sqrt(weak1(t) + weak1(s));
    if (rhs == 0.0) return HUGE_VAL;
    return lhs / rhs;
}

LemmaVerdict holder_positive_part_test(const TrialConfig& cfg) {
    if (cfg.sizes.empty()) throw InvalidParameter("holder_positive_part_test needs at least one size");
    LemmaVerdict out{"holder_positive_part", cfg.seed, cfg.trials, 0.0, kHolderMaxRatio, false, json::object()};
    json per_size = json::array();
    std::vector<double> maxima;
    for (int n : cfg.sizes) {
        auto rng = make_rng(cfg.seed, 0x10000u + static_cast<std::uint64_t>(n));
        std::uniform_real_distribution<double> exponent(0.0, 6.0);
        double worst = 0.0, worst_submaj = 0.0;
        for (int t = 0; t < cfg.trials; ++t) {
            const auto a = random_hermitian(n, cfg.distribution, rng);
            const auto e = random_hermitian(n, TrialDistribution::gaussian_hermitian, rng);
            const Eigen::MatrixXcd b = a + std::pow(10.0, -exponent(rng)) * e;
            worst = std::max(worst, holder_ratio(a, b));
            const auto x = mu_hermitian(sqrt_positive_part(a) - sqrt_positive_part(b));
            worst_submaj = std::max(worst_submaj, partial_sum_ratio(x, mu_hermitian(a - b)));
        }
        maxima.push_back(worst);
        per_size.push_back({{"size", n}, {"max_ratio", worst}, {"max_partial_sum_ratio", worst_submaj}});
        out.worst_case = std::max(out.worst_case, worst);
    }
    const bool bounded = out.worst_case <= kHolderMaxRatio;
    const bool no_growth = maxima.back() <= kHolderGrowthFactor * maxima.front();
    out.pass = bounded && no_growth;
    out.details = {{"per_size", per_size},
                   {"bounded", bounded},
                   {"no_growth", no_growth},
                   {"growth_factor_limit", kHolderGrowthFactor}};
    return out;
}

LemmaVerdict tensor_lemma_test(const std::vector<std::vector<double>>& alphas, std::size_t n_max) {
    LemmaVerdict out{"tensor_lemma", 0, static_cast<int>(alphas.size()), 0.0, kTensorTol, true, json::object()};
    json cases = json::array();
    for (const auto& alpha : alphas) {
        const auto seq = tensor_mu(alpha, n_max);
        const double norm1 = std::accumulate(alpha.begin(), alpha.end(), 0.0);

        std::vector<double> all;
        all.reserve(alpha.size() * n_max);
        for (double a : alpha)
            for (std::size_t i = 0; i < n_max; ++i) all.push_back(a / static_cast<double>(i + 1));
        std::sort(all.begin(), all.end(), std::greater<>{});
        all.resize(n_max);
        const double exact_gap = sequence_gap(seq, SingularValueSeq(std::move(all)));

        double bound_excess = -HUGE_VAL;
        for (std::size_t k = 0; k < seq.size(); ++k)
            bound_excess = std::max(bound_excess, static_cast<double>(k + 1) * seq[k] - norm1);

        const double est = estimate(seq);
        const double err = relative_gap(est, norm1);
        const bool ok = exact_gap <= kExactTol && bound_excess <= kExactTol && err <= kTensorTol;
        out.pass = out.pass && ok;
        out.worst_case = std::max(out.worst_case, err);
        cases.push_back({{"alpha", alpha},
                         {"norm1", norm1},
                         {"estimate", est},
                         {"relative_error", err},
                         {"oracle_gap", exact_gap},
                         {"upper_bound_excess", bound_excess},
                         {"pass", ok}});
    }
    out.details = {{"n_max", n_max}, {"cases", cases}};
    return out;
}

SingularValueSeq synthetic_profile(const SyntheticProfile& p, std::size_t n_max) {
    if (!(p.alpha > 0.0)) throw InvalidParameter("synthetic profile needs alpha > 0");
    std::vector<double> v(n_max);
    for (std::size_t n = 0; n < n_max; ++n) {
        const double x = static_cast<double>(n);
        v[n] = std::max(p.alpha / (x + 1.0) * (1.0 + p.delta / std::log(x + 3.0)), 0.0);
    }
    return sorted_seq(std::move(v));
}

LemmaVerdict direct_sum_lemma_test(const std::vector<SyntheticProfile>& profiles, std::size_t n_max) {
    if (profiles.empty()) throw InvalidParameter("direct_sum_lemma_test needs at least one profile");
    LemmaVerdict out{"direct_sum_lemma", 0, static_cast<int>(profiles.size()), 0.0, kDirectSumTol, false,
                     json::object()};
    std::vector<SingularValueSeq> parts;
    std::vector<double> all;
    double total = 0.0;
    double floor = 0.0; // below this value some block is already truncated
    for (const auto& p : profiles) {
        parts.push_back(synthetic_profile(p, n_max));
        all.insert(all.end(), parts.back().values().begin(), parts.back().values().end());
        total += p.alpha;
        floor = std::max(floor, parts.back().values().back());
    }
    const auto merged = direct_sum_mu(parts);
    const double exact_gap = sequence_gap(merged, sorted_seq(std::move(all)));

    std::size_t complete = 0;
    while (complete < merged.size() && merged[complete] > floor) ++complete;
    const double est = estimate(merged.prefix(complete));
    out.worst_case = relative_gap(est, total);
    out.pass = exact_gap <= kExactTol && out.worst_case <= kDirectSumTol;

    json prof = json::array();
    for (const auto& p : profiles) prof.push_back({{"alpha", p.alpha}, {"delta", p.delta}});
    out.details = {{"profiles", prof},   {"n_max", n_max},         {"fit_length", complete},
                   {"sum_alpha", total}, {"estimate", est},        {"oracle_gap", exact_gap}};
    return out;
}

LemmaVerdict perturbation_limit_test(int rank, double magnitude, int size, std::uint64_t seed) {
    if (rank < 0 || size < 2 * static_cast<int>(kMinEstimatorLength) || rank >= size)
        throw InvalidParameter("perturbation_limit_test: need 0 <= rank < size and size >= 128");
    LemmaVerdict out{"perturbation_limit", seed, 1, 0.0, kPerturbationTol, false, json::object()};

    Eigen::VectorXd diag(size);
    for (int k = 0; k < size; ++k) diag(k) = 1.0 / (k + 1.0);
    std::vector<double> base_values(diag.data(), diag.data() + size);
    const SingularValueSeq base(base_values);
    const double est_base = estimate(base);

    Eigen::MatrixXd s = diag.asDiagonal();
    if (rank > 0) {
        auto rng = make_rng(seed, 0x20000u + static_cast<std::uint64_t>(rank));
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::MatrixXd g(size, rank);
        for (int j = 0; j < rank; ++j)
            for (int i = 0; i < size; ++i) g(i, j) = normal(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        const Eigen::MatrixXd v = qr.householderQ() * Eigen::MatrixXd::Identity(size, rank);
        s.noalias() += magnitude * v * v.transpose();
    }
    const auto bumped = mu_from_eigs(hermitian_eigenvalues(s.cast<std::complex<double>>()));
    const double est_bumped = estimate(bumped);

    std::vector<double> tail(static_cast<std::size_t>(size));
    for (int k = 0; k < size; ++k) tail[static_cast<std::size_t>(k)] = 1.0 / (k + 1.0) + 1.0 / ((k + 1.0) * (k + 1.0));
    const double est_tail = estimate(SingularValueSeq(std::move(tail)));

    const bool zero_identical = magnitude == 0.0 || rank == 0 ? sequence_gap(bumped, base) <= kExactTol : true;
    out.worst_case = std::max(relative_gap(est_bumped, est_base), relative_gap(est_tail, est_base));
    out.pass = out.worst_case <= kPerturbationTol && zero_identical;
    out.details = {{"rank", rank},           {"magnitude", magnitude},   {"size", size},
                   {"estimate_base", est_base}, {"estimate_bumped", est_bumped}, {"estimate_tail", est_tail},
                   {"top_bumped", bumped[0]}};
    return out;
}

LemmaVerdict limit_transfer_test(int m_max, std::size_t n_max) {
    if (m_max < 0) throw InvalidParameter("limit_transfer_test needs m_max >= 0");
    LemmaVerdict out{"limit_transfer", 0, m_max + 1, 0.0, kTransferTol, false, json::object()};
    auto profile = [n_max](double a) {
        std::vector<double> v(n_max);
        for (std::size_t n = 0; n < n_max; ++n) v[n] = a / static_cast<double>(n + 1);
        return SingularValueSeq(std::move(v));
    };
    const double limit = estimate(profile(1.0));
    json family = json::array();
    bool monotone = true;
    double prev = HUGE_VAL;
    for (int m = 0; m <= m_max; ++m) {
        const double est = estimate(profile(1.0 + std::ldexp(1.0, -m)));
        monotone = monotone && est <= prev;
        prev = est;
        family.push_back({{"m", m}, {"estimate", est}});
    }
    out.worst_case = relative_gap(prev, limit);
    out.pass = monotone && out.worst_case <= kTransferTol;
    out.details = {{"family", family}, {"limit_estimate", limit}, {"monotone", monotone}, {"n_max", n_max}};
    return out;
}

LemmaVerdict positive_part_commutation_test(const TorusFunction& f, const std::vector<double>& schedule) {
    if (!f.is_real()) throw InvalidFunction("positive_part_commutation_test requires a real function");
    if (schedule.size() < 2) throw InvalidParameter("positive_part_commutation_test needs at least two cutoffs");
    LemmaVerdict out{"positive_part_commutation", 0, static_cast<int>(schedule.size()), 0.0, 0.0, false,
                     json::object()};
    json rungs = json::array();
    std::vector<double> values;
    bool one_signed = true;
    double max_entry = 0.0;
    for (double r : schedule) {
        const LatticeBasis basis(f.dim(), r);
        const auto w = basis.bessel_weights(f.dim() / 4.0);
        const Eigen::Map<const Eigen::VectorXd> a(w.data(), static_cast<Eigen::Index>(w.size()));
        const Eigen::MatrixXcd b = build_multiplication(f, basis).entries;

        const auto spec = hermitian_eigenvalues(b);
        const double scale = std::max(std::abs(spec.front()), std::abs(spec.back()));
        one_signed = one_signed && (spec.back() >= -1e-12 * scale || spec.front() <= 1e-12 * scale);

        const Eigen::MatrixXcd aba = a.asDiagonal() * b * a.asDiagonal();
        const Eigen::MatrixXcd abpa = a.asDiagonal() * positive_part(b) * a.asDiagonal();
        const Eigen::MatrixXcd diff = positive_part(aba) - abpa;
        max_entry = std::max(max_entry, diff.cwiseAbs().maxCoeff());

        const auto mu = mu_hermitian(diff);
        const std::size_t k = basis.size() / 4;
        const double value = static_cast<double>(k + 1) * mu.at_or_zero(k);
        values.push_back(value);
        const double floor = static_cast<double>(k + 1) * static_cast<double>(basis.size()) *
                             std::numeric_limits<double>::epsilon() * mu_hermitian(aba)[0];
        rungs.push_back({{"R", r},
                         {"dim", basis.size()},
                         {"n", k + 1},
                         {"n_mu", value},
                         {"roundoff_floor", floor},
                         {"below_roundoff", value <= floor},
                         {"max_entry", diff.cwiseAbs().maxCoeff()}});
    }
    if (one_signed) {
        out.threshold = kCommutationZeroTol;
        out.worst_case = max_entry;
        out.pass = max_entry <= kCommutationZeroTol;
    } else {
        out.threshold = kCommutationDecay;
        double worst = 0.0;
        for (std::size_t i = 1; i < values.size(); ++i)
            worst = std::max(worst, values[i - 1] > 0.0 ? values[i] / values[i - 1] : HUGE_VAL);
        out.worst_case = worst;
        out.pass = worst <= kCommutationDecay;
    }
    out.details = {{"f", f.describe()}, {"mode", one_signed ? "one_signed_control" : "decay_trend"}, {"rungs", rungs}};
    return out;
}

} // namespace cif

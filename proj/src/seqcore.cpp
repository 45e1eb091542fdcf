#include "cif/seqcore.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <queue>
#include <string>
#include <tuple>

#include "cif/errors.hpp"

namespace cif {

namespace {

void sort_descending(std::vector<double>& v) { std::sort(v.begin(), v.end(), std::greater<>{}); }

std::vector<std::size_t> log_spaced_indices(std::size_t len, std::size_t count) {
    std::vector<std::size_t> idx;
    if (len == 0) return idx;
    const double top = std::log(static_cast<double>(len));
    for (std::size_t i = 0; i < count; ++i) {
        const double t = top * static_cast<double>(i) / static_cast<double>(count - 1);
        idx.push_back(std::min(len - 1, static_cast<std::size_t>(std::exp(t)) - 1));
    }
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

} // namespace

SingularValueSeq::SingularValueSeq(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k]) || values_[k] < 0.0)
            throw InvalidParameter("singular value " + std::to_string(k) + " is negative or non-finite");
        if (k > 0 && values_[k] > values_[k - 1])
            throw InvalidParameter("singular values must be nonincreasing (index " + std::to_string(k) + ")");
    }
}

SingularValueSeq SingularValueSeq::scaled(double c) const {
    if (!(c >= 0.0)) throw InvalidParameter("scale factor must be nonnegative");
    std::vector<double> v(values_);
    for (auto& x : v) x *= c;
    return SingularValueSeq(std::move(v));
}

SingularValueSeq SingularValueSeq::prefix(std::size_t n) const {
    n = std::min(n, values_.size());
    return SingularValueSeq(std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n)));
}

SingularValueSeq mu_from_eigs(std::span<const double> eigs) {
    std::vector<double> v;
    v.reserve(eigs.size());
    for (double e : eigs) v.push_back(std::abs(e));
    sort_descending(v);
    return SingularValueSeq(std::move(v));
}

SignedParts pos_neg_split(std::span<const double> eigs) {
    std::vector<double> pos;
    std::vector<double> neg;
    for (double e : eigs) {
        if (e > 0.0)
            pos.push_back(e);
        else if (e < 0.0)
            neg.push_back(-e);
    }
    sort_descending(pos);
    sort_descending(neg);
    return {SingularValueSeq(std::move(pos)), SingularValueSeq(std::move(neg))};
}

double weak_quasinorm(const SingularValueSeq& seq, double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidParameter("weak quasi-norm needs p > 0");
    const double inv_p = 1.0 / p;
    double best = 0.0;
    for (std::size_t k = 0; k < seq.size(); ++k)
        best = std::max(best, std::pow(static_cast<double>(k + 1), inv_p) * seq[k]);
    return best;
}

double dixmier_logmean(const SingularValueSeq& seq, std::size_t N) {
    if (N < 2 || N > seq.size())
        throw InvalidParameter("log-mean length N must satisfy 2 <= N <= " + std::to_string(seq.size()));
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t n = 0; n < N; ++n) { // Kahan: N reaches 10^6 and beyond
        const double y = seq[n] - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum / std::log(static_cast<double>(N));
}

SingularValueSeq tensor_mu(std::span<const double> alpha, std::size_t n_max) {
    if (alpha.empty()) throw InvalidParameter("tensor_mu needs a nonempty alpha");
    for (double a : alpha)
        if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidParameter("tensor_mu needs alpha >= 0");

    // k-way merge of the streams alpha[j] / (n + 1), each already nonincreasing.
    using Head = std::tuple<double, std::size_t, std::size_t>; // value, stream, n
    auto cmp = [](const Head& a, const Head& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        return std::get<1>(a) > std::get<1>(b);
    };
    std::priority_queue<Head, std::vector<Head>, decltype(cmp)> heap(cmp);
    for (std::size_t j = 0; j < alpha.size(); ++j) heap.emplace(alpha[j], j, 0);

    std::vector<double> out;
    out.reserve(n_max);
    while (out.size() < n_max) {
        auto [value, j, n] = heap.top();
        heap.pop();
        out.push_back(value);
        heap.emplace(alpha[j] / static_cast<double>(n + 2), j, n + 1);
    }
    return SingularValueSeq(std::move(out));
}

SingularValueSeq direct_sum_mu(std::span<const SingularValueSeq> seqs) {
    std::size_t total = 0;
    for (const auto& s : seqs) total += s.size();
    std::vector<double> v;
    v.reserve(total);
    for (const auto& s : seqs) v.insert(v.end(), s.values().begin(), s.values().end());
    sort_descending(v);
    return SingularValueSeq(std::move(v));
}

AsymptoticsEstimate limit_estimator(const SingularValueSeq& seq) {
    const std::size_t len = seq.size();
    if (len < kMinEstimatorLength)
        throw InvalidParameter("limit estimator needs at least " + std::to_string(kMinEstimatorLength) +
                               " values, got " + std::to_string(len));

    AsymptoticsEstimate est;
    est.window_begin = len / 2;
    est.window_end = len - kEstimatorTailGuard;
    const auto lo = est.window_begin;
    const auto hi = est.window_end;
    const double count = static_cast<double>(hi - lo);

    auto regressor = [](std::size_t k) { return 1.0 / std::log(static_cast<double>(k) + 2.0); };
    auto response = [&](std::size_t k) { return static_cast<double>(k + 1) * seq[k]; };

    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
        mean_x += regressor(k);
        mean_y += response(k);
    }
    mean_x /= count;
    mean_y /= count;

    const double spread = regressor(lo) - regressor(hi - 1);
    if (spread < 1e-6) {
        est.mean_fallback = true;
        est.alpha_hat = mean_y;
        est.beta = 0.0;
    } else {
        double sxx = 0.0;
        double sxy = 0.0;
        for (std::size_t k = lo; k < hi; ++k) {
            const double dx = regressor(k) - mean_x;
            sxx += dx * dx;
            sxy += dx * (response(k) - mean_y);
        }
        est.beta = sxy / sxx;
        est.alpha_hat = mean_y - est.beta * mean_x;
    }

    double ss = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
        const double r = response(k) - (est.alpha_hat + est.beta * regressor(k));
        ss += r * r;
    }
    est.residual = std::sqrt(ss / count);
    est.alpha_hat = std::max(est.alpha_hat, 0.0);

    for (std::size_t k : log_spaced_indices(len, 48)) est.samples.push_back({k + 1, seq[k], response(k)});
    return est;
}

void write_csv(std::ostream& out, const SingularValueSeq& seq) {
    const auto old_precision = out.precision(17);
    out << "n,mu,n_mu\n";
    for (std::size_t k = 0; k < seq.size(); ++k)
        out << (k + 1) << ',' << seq[k] << ',' << static_cast<double>(k + 1) * seq[k] << '\n';
    out.precision(old_precision);
}

nlohmann::json to_json(const SingularValueSeq& seq) {
    return nlohmann::json(std::vector<double>(seq.values().begin(), seq.values().end()));
}

SingularValueSeq seq_from_json(const nlohmann::json& j) { return SingularValueSeq(j.get<std::vector<double>>()); }

nlohmann::json to_json(const AsymptoticsEstimate& est) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : est.samples) samples.push_back({{"n", s.n}, {"mu", s.mu}, {"n_mu", s.n_mu}});
    return {{"alpha_hat", est.alpha_hat},
            {"beta", est.beta},
            {"window", {est.window_begin, est.window_end}},
            {"residual", est.residual},
            {"mean_fallback", est.mean_fallback},
            {"samples", samples}};
}

} // namespace cif

#pragma once

// Finite singular-value sequences and the sequence-level machinery used to
// study the asymptotics of t * mu(t, T).
//
// Index convention: entry k of a sequence is mu(k, T) and is identified with
// the step function equal to mu(k, T) on the interval (k, k + 1).  Wherever a
// product "n * mu(n)" appears (estimator, CSV dumps, weak quasi-norms) it is
// evaluated at the right end point t = k + 1 of the step, so that the exact
// profile mu(k) = a / (k + 1) has t * mu(t) == a at every index.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

namespace cif {

/// Nonincreasing, nonnegative list of singular values mu(0) >= mu(1) >= ... >= 0.
class SingularValueSeq {
public:
    SingularValueSeq() = default;

    /// Takes ownership of `values`; throws InvalidParameter unless the list is
    /// nonincreasing, finite and nonnegative.
    explicit SingularValueSeq(std::vector<double> values);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] double operator[](std::size_t k) const { return values_[k]; }

    /// mu(k) or 0 past the end (a finite-rank operator has trailing zeros).
    [[nodiscard]] double at_or_zero(std::size_t k) const noexcept {
        return k < values_.size() ? values_[k] : 0.0;
    }

    [[nodiscard]] SingularValueSeq scaled(double c) const;
    [[nodiscard]] SingularValueSeq prefix(std::size_t n) const;

    friend bool operator==(const SingularValueSeq&, const SingularValueSeq&) = default;

private:
    std::vector<double> values_;
};

struct EstimateSample {
    std::size_t n = 0; // step right end point k + 1
    double mu = 0.0;
    double n_mu = 0.0;
};

/// Estimated limit of n * mu(n) together with the data it was fitted on.
struct AsymptoticsEstimate {
    double alpha_hat = 0.0;
    double beta = 0.0;           // coefficient of the 1 / ln(n + 2) correction
    std::size_t window_begin = 0; // half-open index range [begin, end)
    std::size_t window_end = 0;
    double residual = 0.0;       // RMS of the fit over the window
    bool mean_fallback = false;  // regressor spread too small, plain mean used
    std::vector<EstimateSample> samples;
};

SingularValueSeq mu_from_eigs(std::span<const double> eigs);

struct SignedParts {
    SingularValueSeq positive;
    SingularValueSeq negative;
};

/// Splits a self-adjoint spectrum into mu(T_+) and mu(T_-); zeros go to neither.
SignedParts pos_neg_split(std::span<const double> eigs);

/// sup_k (k + 1)^{1/p} mu(k).
double weak_quasinorm(const SingularValueSeq& seq, double p);

/// (1 / log N) * sum_{n < N} mu(n).
double dixmier_logmean(const SingularValueSeq& seq, std::size_t N);

/// mu(z (x) alpha) with z(n) = 1 / (n + 1), first n_max entries.
SingularValueSeq tensor_mu(std::span<const double> alpha, std::size_t n_max);

/// mu of a block-diagonal operator: the nonincreasing merge of the blocks.
SingularValueSeq direct_sum_mu(std::span<const SingularValueSeq> seqs);

/// Least-squares fit of (n + 1) mu(n) ~ alpha + beta / ln(n + 2) over the
/// window [len / 2, len - 10).  Requires len >= 64.
AsymptoticsEstimate limit_estimator(const SingularValueSeq& seq);

inline constexpr std::size_t kMinEstimatorLength = 64;
inline constexpr std::size_t kEstimatorTailGuard = 10;

/// CSV with header "n,mu,n_mu"; n is the step end point k + 1.
void write_csv(std::ostream& out, const SingularValueSeq& seq);
nlohmann::json to_json(const SingularValueSeq& seq);
SingularValueSeq seq_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AsymptoticsEstimate& est);

} // namespace cif

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cif/errors.hpp"
#include "cif/seqcore.hpp"

using namespace cif;

namespace {

std::vector<double> harmonic(std::size_t n, double a = 1.0) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = a / static_cast<double>(k + 1);
    return v;
}

std::vector<double> as_vector(const SingularValueSeq& s) { return {s.values().begin(), s.values().end()}; }

} // namespace

TEST(SingularValueSeq, RejectsIncreasingNegativeAndNonFinite) {
    EXPECT_THROW(SingularValueSeq({1.0, 2.0}), InvalidParameter);
    EXPECT_THROW(SingularValueSeq({1.0, -0.5}), InvalidParameter);
    EXPECT_THROW(SingularValueSeq({NAN}), InvalidParameter);
    EXPECT_THROW(SingularValueSeq({INFINITY, 1.0}), InvalidParameter);
    EXPECT_NO_THROW(SingularValueSeq({2.0, 2.0, 0.0}));
}

TEST(SingularValueSeq, PrefixAndScaling) {
    const SingularValueSeq s({4.0, 2.0, 1.0});
    EXPECT_EQ(as_vector(s.prefix(2)), (std::vector<double>{4.0, 2.0}));
    EXPECT_EQ(s.prefix(10).size(), 3u);
    EXPECT_EQ(as_vector(s.scaled(0.5)), (std::vector<double>{2.0, 1.0, 0.5}));
    EXPECT_THROW(s.scaled(-0.5), InvalidParameter);
    EXPECT_DOUBLE_EQ(s.at_or_zero(7), 0.0);
}

TEST(MuFromEigs, SortsAbsoluteValues) {
    EXPECT_EQ(as_vector(mu_from_eigs(std::vector<double>{-3.0, 2.0, 1.0})), (std::vector<double>{3.0, 2.0, 1.0}));
    EXPECT_TRUE(mu_from_eigs(std::vector<double>{}).empty());
}

TEST(MuFromEigs, MatchesIndependentSortOracle) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal;
    std::vector<double> eigs(1000);
    for (double& x : eigs) x = normal(rng);
    std::vector<double> oracle;
    for (double x : eigs) oracle.push_back(std::fabs(x));
    std::sort(oracle.rbegin(), oracle.rend());
    EXPECT_EQ(as_vector(mu_from_eigs(eigs)), oracle);
}

TEST(PosNegSplit, SplitsBySignAndDropsZeros) {
    const auto p = pos_neg_split(std::vector<double>{0.5, -0.2, 0.1});
    EXPECT_EQ(as_vector(p.positive), (std::vector<double>{0.5, 0.1}));
    EXPECT_EQ(as_vector(p.negative), (std::vector<double>{0.2}));
    const auto z = pos_neg_split(std::vector<double>{0.0, 0.0});
    EXPECT_TRUE(z.positive.empty());
    EXPECT_TRUE(z.negative.empty());
}

TEST(PosNegSplit, MergeEqualsMuWithoutZeros) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    std::vector<double> eigs(500);
    for (double& x : eigs) x = normal(rng);
    eigs[3] = 0.0;
    eigs[77] = 0.0;
    const auto parts = pos_neg_split(eigs);
    std::vector<SingularValueSeq> both{parts.positive, parts.negative};
    auto mu = as_vector(mu_from_eigs(eigs));
    mu.resize(mu.size() - 2);
    EXPECT_EQ(as_vector(direct_sum_mu(both)), mu);
}

TEST(WeakQuasinorm, ClosedForms) {
    EXPECT_NEAR(weak_quasinorm(SingularValueSeq(harmonic(10000)), 1.0), 1.0, 1e-12);
    EXPECT_NEAR(weak_quasinorm(SingularValueSeq({1.0, 1.0, 1.0}), 2.0), std::sqrt(3.0), 1e-12);
    EXPECT_THROW(weak_quasinorm(SingularValueSeq({1.0}), 0.0), InvalidParameter);
    EXPECT_THROW(weak_quasinorm(SingularValueSeq({1.0}), -1.0), InvalidParameter);
}

TEST(WeakQuasinorm, MatchesExhaustiveScan) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(300);
    for (double& x : v) x = u(rng);
    std::sort(v.rbegin(), v.rend());
    double best = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) best = std::max(best, std::pow(k + 1.0, 2.0) * v[k]);
    EXPECT_NEAR(weak_quasinorm(SingularValueSeq(v), 0.5), best, 1e-12 * best);
}

TEST(DixmierLogmean, HarmonicOracle) {
    EXPECT_NEAR(dixmier_logmean(SingularValueSeq(harmonic(1000000)), 1000000), 1.04178029921368, 1e-10);
    const double one = dixmier_logmean(SingularValueSeq(harmonic(10000)), 10000);
    EXPECT_NEAR(one, 1.06267582312426, 1e-10);
    EXPECT_NEAR(dixmier_logmean(SingularValueSeq(harmonic(10000, 2.0)), 10000), 2.0 * one, 1e-12);
    EXPECT_DOUBLE_EQ(dixmier_logmean(SingularValueSeq(std::vector<double>(50, 0.0)), 50), 0.0);
    EXPECT_THROW(dixmier_logmean(SingularValueSeq(harmonic(10)), 11), InvalidParameter);
    EXPECT_THROW(dixmier_logmean(SingularValueSeq(harmonic(10)), 1), InvalidParameter);
}

TEST(TensorMu, SmallCases) {
    EXPECT_EQ(as_vector(tensor_mu(std::vector<double>{1.0}, 4)), harmonic(4));
    const auto two = as_vector(tensor_mu(std::vector<double>{1.0, 1.0}, 6));
    const std::vector<double> expect2{1.0, 1.0, 0.5, 0.5, 1.0 / 3, 1.0 / 3};
    for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(two[k], expect2[k], 1e-15);
    const auto three = as_vector(tensor_mu(std::vector<double>{3.0, 1.0}, 5));
    const std::vector<double> expect3{3.0, 1.5, 1.0, 1.0, 0.75};
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(three[k], expect3[k], 1e-15);
}

TEST(DirectSumMu, MergesBlocks) {
    std::vector<SingularValueSeq> blocks{SingularValueSeq({1.0, 0.5}), SingularValueSeq({0.8, 0.3})};
    EXPECT_EQ(as_vector(direct_sum_mu(blocks)), (std::vector<double>{1.0, 0.8, 0.5, 0.3}));
    std::vector<SingularValueSeq> single{SingularValueSeq({2.0, 1.0})};
    EXPECT_EQ(direct_sum_mu(single), single[0]);
}

TEST(DirectSumMu, MatchesConcatenationOracle) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::vector<SingularValueSeq> blocks;
    std::vector<double> all;
    for (int b = 0; b < 4; ++b) {
        std::vector<double> v(50 + 10 * b);
        for (double& x : v) x = u(rng);
        std::sort(v.rbegin(), v.rend());
        all.insert(all.end(), v.begin(), v.end());
        blocks.emplace_back(v);
    }
    std::sort(all.rbegin(), all.rend());
    EXPECT_EQ(as_vector(direct_sum_mu(blocks)), all);
}

TEST(LimitEstimator, ExactHarmonicProfile) {
    const auto est = limit_estimator(SingularValueSeq(harmonic(100000, 2.0)));
    EXPECT_NEAR(est.alpha_hat, 2.0, 1e-6);
    EXPECT_EQ(est.window_begin, 50000u);
    EXPECT_EQ(est.window_end, 100000u - kEstimatorTailGuard);
    EXPECT_FALSE(est.samples.empty());
}

TEST(LimitEstimator, LogCorrectedProfile) {
    std::vector<double> v(100000);
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = (2.0 + 5.0 / std::log(n + 3.0)) / (n + 1.0);
    EXPECT_NEAR(limit_estimator(SingularValueSeq(v)).alpha_hat, 2.0, 0.06);
}

TEST(LimitEstimator, ZeroAndTooShort) {
    EXPECT_DOUBLE_EQ(limit_estimator(SingularValueSeq(std::vector<double>(100, 0.0))).alpha_hat, 0.0);
    EXPECT_THROW(limit_estimator(SingularValueSeq(harmonic(kMinEstimatorLength - 1))), InvalidParameter);
}

TEST(Serialization, CsvAndJson) {
    std::ostringstream os;
    write_csv(os, SingularValueSeq({1.0, 0.5}));
    EXPECT_EQ(os.str(), "n,mu,n_mu\n1,1,1\n2,0.5,1\n");
    const SingularValueSeq s(harmonic(20));
    EXPECT_EQ(seq_from_json(to_json(s)), s);
    EXPECT_TRUE(to_json(s).is_array());
}

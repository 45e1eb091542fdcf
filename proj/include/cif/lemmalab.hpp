#pragma once

// Seeded finite-scale probes of the abstract operator lemmas: exact
// inequalities are checked exactly, asymptotic statements as trends.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cif/seqcore.hpp"
#include "cif/torus_function.hpp"

namespace cif {

enum class TrialDistribution { gaussian_hermitian, prescribed_profile };

struct TrialConfig {
    std::uint64_t seed = 0xC1F;
    int trials = 500;
    std::vector<int> sizes;
    TrialDistribution distribution = TrialDistribution::gaussian_hermitian;
};

/// Common verdict record; `details` carries test-specific diagnostics.
struct LemmaVerdict {
    std::string test;
    std::uint64_t seed = 0;
    int trials = 0;
    double worst_case = 0.0;
    double threshold = 0.0;
    bool pass = false;
    nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const LemmaVerdict& v);

/// mu(2n, TS) <= mu(n, T) mu(n, S) over seeded complex Gaussian pairs.
/// worst_case is the largest mu(2n, TS) - mu(n, T) mu(n, S); threshold 1e-10.
LemmaVerdict product_inequality_test(const TrialConfig& cfg);

/// ||T_+ - S_+||_{1,inf} / (||T - S||_{1,inf}^{1/2} (||T||_{1,inf} + ||S||_{1,inf})^{1/2})
/// over seeded Hermitian pairs S = T + eps E.  Passes when the largest ratio is
/// at most 10 and the largest size's maximum is at most twice the smallest's.
LemmaVerdict holder_positive_part_test(const TrialConfig& cfg);

/// The ratio above for a single pair; 0 when T = S.
double holder_ratio(const Eigen::MatrixXcd& t, const Eigen::MatrixXcd& s);

/// lim n mu(n, z (x) alpha) = ||alpha||_1 with z(n) = 1 / (n + 1).
LemmaVerdict tensor_lemma_test(const std::vector<std::vector<double>>& alphas, std::size_t n_max = 100000);

struct SyntheticProfile {
    double alpha = 1.0;
    double delta = 0.0; // mu(n) = alpha / (n + 1) * (1 + delta / ln(n + 3)), rearranged
};

/// First n_max entries of the decreasing rearrangement of a synthetic profile.
SingularValueSeq synthetic_profile(const SyntheticProfile& p, std::size_t n_max);

/// The limit of a direct sum is the sum of the limits.
LemmaVerdict direct_sum_lemma_test(const std::vector<SyntheticProfile>& profiles, std::size_t n_max = 100000);

/// Limits agree under a finite-rank perturbation (matrix size `size`) and under
/// a summable n^-2 tail.
LemmaVerdict perturbation_limit_test(int rank = 3, double magnitude = 10.0, int size = 4096,
                                     std::uint64_t seed = 0xC1F);

/// Profiles (1 + 2^-m) / (n + 1) converge to 1 / (n + 1); their limits follow.
LemmaVerdict limit_transfer_test(int m_max = 10, std::size_t n_max = 100000);

/// (n + 1) mu(n, (ABA)_+ - A B_+ A) at n = dim / 4 with A the truncated
/// (1 - Laplacian)^{-d/4} and B the truncated M_f.  For sign-changing f the
/// value must fall by at least 20% per rung; for f of one sign the difference
/// must vanish to 1e-9.
LemmaVerdict positive_part_commutation_test(const TorusFunction& f, const std::vector<double>& schedule);

} // namespace cif

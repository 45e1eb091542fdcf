#pragma once

// Finite Fourier-lattice truncations of multiplication operators and Bessel
// weights on the flat torus T^d.
//
// Basis: e_k(x) = exp(i k.x) for integer k with |k| <= R, ordered by |k|^2
// and then lexicographically.  In this basis (1 - Laplacian) is diagonal with
// entries 1 + |k|^2, and M_f has entries c_f(k - l) where
// f(x) = sum_m c_f(m) exp(i m.x).

#include <array>
#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cif/seqcore.hpp"
#include "cif/torus_function.hpp"

namespace cif {

using LatticePoint = std::array<int, 3>; // unused trailing components are 0

class LatticeBasis {
public:
    LatticeBasis(int d, double cutoff);

    [[nodiscard]] int dim() const noexcept { return d_; }
    [[nodiscard]] double cutoff() const noexcept { return cutoff_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] const std::vector<LatticePoint>& points() const noexcept { return points_; }
    [[nodiscard]] const LatticePoint& operator[](std::size_t i) const { return points_[i]; }
    [[nodiscard]] long norm2(std::size_t i) const;
    /// Largest |k_i| over the basis, per axis.
    [[nodiscard]] int max_abs_component() const noexcept { return max_component_; }

    /// w(k) = (1 + |k|^2)^{-exponent}; the weight of (1 - Laplacian)^{-exponent}.
    [[nodiscard]] std::vector<double> bessel_weights(double exponent) const;

private:
    int d_;
    double cutoff_;
    int max_component_ = 0;
    std::vector<LatticePoint> points_;
};

/// Fourier coefficients on the window [-max_freq, max_freq]^d.
class FourierCoefficients {
public:
    FourierCoefficients(int d, int max_freq);

    [[nodiscard]] int dim() const noexcept { return d_; }
    [[nodiscard]] int max_freq() const noexcept { return max_freq_; }
    [[nodiscard]] std::complex<double> operator()(std::span<const int> m) const;
    [[nodiscard]] std::complex<double> at(const LatticePoint& m) const;
    void set(std::span<const int> m, std::complex<double> value);
    [[nodiscard]] bool in_window(std::span<const int> m) const;

private:
    [[nodiscard]] std::size_t offset(std::span<const int> m) const;

    int d_;
    int max_freq_;
    std::vector<std::complex<double>> data_;
};

inline constexpr int kDefaultOversample = 4;

/// c_f(m) for |m_i| <= max_freq.  Closed forms are used when the family has
/// them; otherwise a DFT on oversample * (2 max_freq + 1) points per axis.
/// Radially singular families are split with a smooth cutoff: the regular part
/// goes through the DFT, the singular core through a radial Hankel-type
/// integral on dyadic shells.  For real f the result satisfies
/// c(-m) = conj(c(m)) exactly.
FourierCoefficients fourier_coeffs(const TorusFunction& f, int max_freq, int oversample = kDefaultOversample);

enum class OperatorKind { symmetric, asymmetric, multiplication, commutator, weighted };

std::string to_string(OperatorKind kind);

struct TruncatedOperator {
    LatticeBasis basis;
    Eigen::MatrixXcd entries;
    OperatorKind kind;
    nlohmann::json f_descriptor;
};

/// P M_f P.
TruncatedOperator build_multiplication(const TorusFunction& f, const LatticeBasis& basis,
                                       int oversample = kDefaultOversample);
/// P W M_f W P with W = (1 - Laplacian)^{-d/4}; f must be real.
TruncatedOperator build_symmetric(const TorusFunction& f, const LatticeBasis& basis,
                                  int oversample = kDefaultOversample);
/// P M_f W^2 P.
TruncatedOperator build_asymmetric(const TorusFunction& f, const LatticeBasis& basis,
                                   int oversample = kDefaultOversample);
/// P M_f W P, the operator of the Cwikel-type estimate.
TruncatedOperator build_weighted(const TorusFunction& f, const LatticeBasis& basis,
                                 int oversample = kDefaultOversample);
/// P [M_f, W] P.
TruncatedOperator build_commutator(const TorusFunction& f, const LatticeBasis& basis,
                                   int oversample = kDefaultOversample);

/// Eigenvalues of a Hermitian truncation, descending.
std::vector<double> eig_hermitian(const TruncatedOperator& op);
SingularValueSeq singvals(const TruncatedOperator& op);
double hs_norm(const TruncatedOperator& op);

/// Binary container: uint64 rows, uint64 cols, then rows * cols (re, im)
/// pairs of little-endian IEEE doubles in row-major order.
void write_matrix_binary(std::ostream& out, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_matrix_binary(std::istream& in);

/// CSV "rank,singular_value", rank starting at 0.
void write_spectrum_csv(std::ostream& out, const SingularValueSeq& seq);

} // namespace cif

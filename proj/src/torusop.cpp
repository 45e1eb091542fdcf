#include "cif/torusop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>

#include <fftw3.h>

#include "cif/errors.hpp"
#include "cif/gauss.hpp"
#include "cif/linalg.hpp"
#include "cif/quadrature.hpp"

namespace cif {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHermitianTol = 1e-10;

// The FFTW planner is not re-entrant.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
        if (data == nullptr) throw BuildFailure("FFTW allocation failed");
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

/// Visits every multi-index of the window [-M, M]^d.
template <class Fn>
void for_each_frequency(int d, int max_freq, Fn&& fn) {
    std::array<int, 3> m{0, 0, 0};
    const int lo = -max_freq;
    for (int a = lo; a <= max_freq; ++a) {
        m[0] = a;
        if (d == 1) {
            fn(std::span<const int>(m.data(), 1));
            continue;
        }
        for (int b = lo; b <= max_freq; ++b) {
            m[1] = b;
            if (d == 2) {
                fn(std::span<const int>(m.data(), 2));
                continue;
            }
            for (int c = lo; c <= max_freq; ++c) {
                m[2] = c;
                fn(std::span<const int>(m.data(), 3));
            }
        }
    }
}

/// Radial kernel: integral of exp(-i m.x) over the unit sphere of radius r, per unit r^{d-1}.
double radial_kernel(int d, double s) {
    switch (d) {
    case 1: return 2.0 * std::cos(s);
    case 2: return kTwoPi * std::cyl_bessel_j(0.0, s);
    default: return s == 0.0 ? 4.0 * kPi : 4.0 * kPi * std::sin(s) / s;
    }
}

/// Contribution of chi(r) f(r) to the coefficients of a radial family.
void add_radial_core(const TorusFunction& f, const RadialRefinement& ref, FourierCoefficients& c) {
    const int d = f.dim();
    const int max_freq = c.max_freq();
    const double kmax = std::sqrt(static_cast<double>(d)) * max_freq;
    const double panel_max = 2.0 / (kmax + 1.0);
    const auto rule = gauss_legendre(ref.gauss_order);

    std::vector<double> nodes;
    std::vector<double> weights;
    auto add_shell = [&](double a, double b) {
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel_max)));
        const double width = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double pa = a + p * width;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const double r = pa + 0.5 * width * (1.0 + rule.nodes[q]);
                const double chi = smooth_cutoff(r, ref.inner, ref.outer);
                if (chi == 0.0) continue;
                nodes.push_back(r);
                weights.push_back(0.5 * width * rule.weights[q] * std::pow(r, d - 1) * chi * f.radial_value(r));
            }
        }
    };
    double upper = ref.outer;
    for (int l = 0; l < ref.levels; ++l) {
        add_shell(0.5 * upper, upper);
        upper *= 0.5;
    }
    add_shell(0.0, upper);

    const double norm = std::pow(kTwoPi, -d);
    std::map<long, double> by_radius;
    for_each_frequency(d, max_freq, [&](std::span<const int> m) {
        long m2 = 0;
        for (int v : m) m2 += static_cast<long>(v) * v;
        auto it = by_radius.find(m2);
        if (it == by_radius.end()) {
            const double k = std::sqrt(static_cast<double>(m2));
            double sum = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * radial_kernel(d, k * nodes[i]);
            it = by_radius.emplace(m2, norm * sum).first;
        }
        c.set(m, c(m) + it->second);
    });
}

void check_hermitian_and_symmetrize(Eigen::MatrixXcd& a, const char* what) {
    const Eigen::Index n = a.rows();
    double scale = 0.0;
    double defect = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, j)));
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j; i < n; ++i) defect = std::max(defect, std::abs(a(i, j) - std::conj(a(j, i))));
    if (defect > kHermitianTol * scale)
        throw BuildFailure(std::string(what) + " is not Hermitian: defect " + std::to_string(defect / scale));
    for (Eigen::Index j = 0; j < n; ++j) {
        a(j, j) = a(j, j).real();
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const auto v = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
}

Eigen::MatrixXcd multiplication_matrix(const TorusFunction& f, const LatticeBasis& basis, int oversample) {
    if (f.dim() != basis.dim()) throw InvalidParameter("function and basis dimensions differ");
    const int max_freq = std::max(1, 2 * basis.max_abs_component());
    const auto coeffs = fourier_coeffs(f, max_freq, oversample);
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd c(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& l = basis[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& k = basis[static_cast<std::size_t>(i)];
            c(i, j) = coeffs.at({k[0] - l[0], k[1] - l[1], k[2] - l[2]});
        }
    }
    return c;
}

bool is_skew_hermitian(const Eigen::MatrixXcd& a) {
    const Eigen::Index n = a.rows();
    double scale = 0.0;
    double defect = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            scale = std::max(scale, std::abs(a(i, j)));
            defect = std::max(defect, std::abs(a(i, j) + std::conj(a(j, i))));
        }
    return defect <= kHermitianTol * scale;
}

bool is_hermitian(const Eigen::MatrixXcd& a) { return hermitian_defect(a) <= kHermitianTol; }

} // namespace

// ---------------------------------------------------------------- LatticeBasis

LatticeBasis::LatticeBasis(int d, double cutoff) : d_(d), cutoff_(cutoff) {
    if (d < 1 || d > 3) throw UnsupportedDimension("lattice bases support d = 1, 2, 3");
    if (!(cutoff >= 0.0) || !std::isfinite(cutoff)) throw InvalidParameter("lattice cutoff must be >= 0");
    const int K = static_cast<int>(std::floor(cutoff));
    const double r2 = cutoff * cutoff;
    const int K1 = d >= 2 ? K : 0;
    const int K2 = d >= 3 ? K : 0;
    for (int a = -K; a <= K; ++a)
        for (int b = -K1; b <= K1; ++b)
            for (int c = -K2; c <= K2; ++c) {
                const long n2 = static_cast<long>(a) * a + static_cast<long>(b) * b + static_cast<long>(c) * c;
                if (static_cast<double>(n2) <= r2) points_.push_back({a, b, c});
            }
    std::sort(points_.begin(), points_.end(), [](const LatticePoint& x, const LatticePoint& y) {
        const long nx = static_cast<long>(x[0]) * x[0] + static_cast<long>(x[1]) * x[1] + static_cast<long>(x[2]) * x[2];
        const long ny = static_cast<long>(y[0]) * y[0] + static_cast<long>(y[1]) * y[1] + static_cast<long>(y[2]) * y[2];
        if (nx != ny) return nx < ny;
        return x < y;
    });
    for (const auto& p : points_)
        for (int v : p) max_component_ = std::max(max_component_, std::abs(v));
}

long LatticeBasis::norm2(std::size_t i) const {
    const auto& p = points_[i];
    return static_cast<long>(p[0]) * p[0] + static_cast<long>(p[1]) * p[1] + static_cast<long>(p[2]) * p[2];
}

std::vector<double> LatticeBasis::bessel_weights(double exponent) const {
    std::vector<double> w(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i)
        w[i] = std::pow(1.0 + static_cast<double>(norm2(i)), -exponent);
    return w;
}

// --------------------------------------------------------- FourierCoefficients

FourierCoefficients::FourierCoefficients(int d, int max_freq) : d_(d), max_freq_(max_freq) {
    if (d < 1 || d > 3) throw UnsupportedDimension("coefficient windows support d = 1, 2, 3");
    if (max_freq < 0) throw InvalidParameter("max_freq must be >= 0");
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(2 * max_freq + 1);
    data_.assign(n, 0.0);
}

bool FourierCoefficients::in_window(std::span<const int> m) const {
    for (int i = 0; i < d_; ++i)
        if (std::abs(m[static_cast<std::size_t>(i)]) > max_freq_) return false;
    return true;
}

std::size_t FourierCoefficients::offset(std::span<const int> m) const {
    std::size_t idx = 0;
    const auto width = static_cast<std::size_t>(2 * max_freq_ + 1);
    for (int i = 0; i < d_; ++i) idx = idx * width + static_cast<std::size_t>(m[static_cast<std::size_t>(i)] + max_freq_);
    return idx;
}

std::complex<double> FourierCoefficients::operator()(std::span<const int> m) const {
    if (static_cast<int>(m.size()) < d_) throw InvalidParameter("frequency has too few components");
    if (!in_window(m)) return 0.0;
    return data_[offset(m)];
}

std::complex<double> FourierCoefficients::at(const LatticePoint& m) const {
    return (*this)(std::span<const int>(m.data(), static_cast<std::size_t>(d_)));
}

void FourierCoefficients::set(std::span<const int> m, std::complex<double> value) {
    if (!in_window(m)) throw InvalidParameter("frequency outside the coefficient window");
    data_[offset(m)] = value;
}

FourierCoefficients fourier_coeffs(const TorusFunction& f, int max_freq, int oversample) {
    if (max_freq < 1) throw InvalidParameter("max_freq must be >= 1");
    if (oversample < 2) throw InvalidParameter("oversample must be >= 2");
    const int d = f.dim();
    FourierCoefficients c(d, max_freq);

    if (f.has_exact_fourier()) {
        for_each_frequency(d, max_freq, [&](std::span<const int> m) { c.set(m, f.exact_fourier(m)); });
        return c;
    }

    const int N = oversample * (2 * max_freq + 1);
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(N);
    const double h = kTwoPi / N;
    const RadialRefinement ref{};
    const bool radial = f.is_radial_singular();

    FftwBuffer in(total);
    FftwBuffer out(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::array<double, 3> x{0.0, 0.0, 0.0};
        std::size_t rest = idx;
        for (int axis = d - 1; axis >= 0; --axis) {
            x[static_cast<std::size_t>(axis)] = -kPi + h * static_cast<double>(rest % static_cast<std::size_t>(N));
            rest /= static_cast<std::size_t>(N);
        }
        std::complex<double> v;
        if (radial) {
            const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
            const double keep = 1.0 - smooth_cutoff(r, ref.inner, ref.outer);
            v = keep == 0.0 ? 0.0 : keep * f(std::span<const double>(x.data(), static_cast<std::size_t>(d)));
        } else {
            v = f(std::span<const double>(x.data(), static_cast<std::size_t>(d)));
        }
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InvalidFunction("function has a non-finite sample");
        in.data[idx][0] = v.real();
        in.data[idx][1] = v.imag();
    }

    std::array<int, 3> dims{N, N, N};
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft(d, dims.data(), in.data, out.data, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    // Nodes start at -pi, so exp(-i m x_j) = (-1)^m exp(-2 pi i m j / N).
    const double inv_total = 1.0 / static_cast<double>(total);
    for_each_frequency(d, max_freq, [&](std::span<const int> m) {
        std::size_t idx = 0;
        int parity = 0;
        for (int i = 0; i < d; ++i) {
            const int mi = m[static_cast<std::size_t>(i)];
            idx = idx * static_cast<std::size_t>(N) + static_cast<std::size_t>(((mi % N) + N) % N);
            parity += mi;
        }
        const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
        c.set(m, sign * inv_total * std::complex<double>(out.data[idx][0], out.data[idx][1]));
    });

    if (radial) add_radial_core(f, ref, c);

    if (f.is_real()) {
        for_each_frequency(d, max_freq, [&](std::span<const int> m) {
            std::array<int, 3> neg{0, 0, 0};
            for (std::size_t i = 0; i < m.size(); ++i) neg[i] = -m[i];
            const std::span<const int> mneg(neg.data(), m.size());
            if (std::lexicographical_compare(m.begin(), m.end(), mneg.begin(), mneg.end())) return;
            const auto v = 0.5 * (c(m) + std::conj(c(mneg)));
            c.set(m, v);
            c.set(mneg, std::conj(v));
        });
    }
    return c;
}

// ------------------------------------------------------------------ operators

std::string to_string(OperatorKind kind) {
    switch (kind) {
    case OperatorKind::symmetric: return "symmetric";
    case OperatorKind::asymmetric: return "asymmetric";
    case OperatorKind::multiplication: return "multiplication";
    case OperatorKind::commutator: return "commutator";
    case OperatorKind::weighted: return "weighted";
    }
    return "unknown";
}

TruncatedOperator build_multiplication(const TorusFunction& f, const LatticeBasis& basis, int oversample) {
    return {basis, multiplication_matrix(f, basis, oversample), OperatorKind::multiplication, f.describe()};
}

TruncatedOperator build_symmetric(const TorusFunction& f, const LatticeBasis& basis, int oversample) {
    if (!f.is_real()) throw InvalidFunction("the symmetric operator needs a real-valued function");
    Eigen::MatrixXcd a = multiplication_matrix(f, basis, oversample);
    const auto w = basis.bessel_weights(0.25 * basis.dim());
    const Eigen::Index n = a.rows();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) a(i, j) *= w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
    check_hermitian_and_symmetrize(a, "symmetric truncation");
    return {basis, std::move(a), OperatorKind::symmetric, f.describe()};
}

TruncatedOperator build_asymmetric(const TorusFunction& f, const LatticeBasis& basis, int oversample) {
    Eigen::MatrixXcd a = multiplication_matrix(f, basis, oversample);
    const auto w2 = basis.bessel_weights(0.5 * basis.dim());
    for (Eigen::Index j = 0; j < a.cols(); ++j) a.col(j) *= w2[static_cast<std::size_t>(j)];
    return {basis, std::move(a), OperatorKind::asymmetric, f.describe()};
}

TruncatedOperator build_weighted(const TorusFunction& f, const LatticeBasis& basis, int oversample) {
    Eigen::MatrixXcd a = multiplication_matrix(f, basis, oversample);
    const auto w = basis.bessel_weights(0.25 * basis.dim());
    for (Eigen::Index j = 0; j < a.cols(); ++j) a.col(j) *= w[static_cast<std::size_t>(j)];
    return {basis, std::move(a), OperatorKind::weighted, f.describe()};
}

TruncatedOperator build_commutator(const TorusFunction& f, const LatticeBasis& basis, int oversample) {
    Eigen::MatrixXcd a = multiplication_matrix(f, basis, oversample);
    const auto w = basis.bessel_weights(0.25 * basis.dim());
    const Eigen::Index n = a.rows();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) a(i, j) *= w[static_cast<std::size_t>(j)] - w[static_cast<std::size_t>(i)];
    if (f.is_real() && !is_skew_hermitian(a)) throw BuildFailure("commutator of a real function is not skew-Hermitian");
    return {basis, std::move(a), OperatorKind::commutator, f.describe()};
}

std::vector<double> eig_hermitian(const TruncatedOperator& op) {
    if (!is_hermitian(op.entries))
        throw ContractViolation("eig_hermitian called on a non-Hermitian " + to_string(op.kind) + " operator");
    return hermitian_eigenvalues(op.entries);
}

SingularValueSeq singvals(const TruncatedOperator& op) {
    if ((op.kind == OperatorKind::symmetric || op.kind == OperatorKind::multiplication) && is_hermitian(op.entries))
        return mu_from_eigs(hermitian_eigenvalues(op.entries));
    if (op.kind == OperatorKind::commutator && is_skew_hermitian(op.entries)) {
        const Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * op.entries;
        return mu_from_eigs(hermitian_eigenvalues(h));
    }
    return SingularValueSeq(singular_values(op.entries));
}

double hs_norm(const TruncatedOperator& op) { return op.entries.norm(); }

void write_matrix_binary(std::ostream& out, const Eigen::MatrixXcd& m) {
    const auto rows = static_cast<std::uint64_t>(m.rows());
    const auto cols = static_cast<std::uint64_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double pair[2] = {m(i, j).real(), m(i, j).imag()};
            out.write(reinterpret_cast<const char*>(pair), sizeof pair);
        }
    if (!out) throw BuildFailure("failed to write matrix container");
}

Eigen::MatrixXcd read_matrix_binary(std::istream& in) {
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&cols), sizeof cols);
    if (!in) throw InvalidParameter("truncated matrix container header");
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double pair[2];
            in.read(reinterpret_cast<char*>(pair), sizeof pair);
            m(i, j) = {pair[0], pair[1]};
        }
    if (!in) throw InvalidParameter("truncated matrix container body");
    return m;
}

void write_spectrum_csv(std::ostream& out, const SingularValueSeq& seq) {
    const auto old_precision = out.precision(17);
    out << "rank,singular_value\n";
    for (std::size_t k = 0; k < seq.size(); ++k) out << k << ',' << seq[k] << '\n';
    out.precision(old_precision);
}

} // namespace cif

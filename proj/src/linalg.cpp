#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "cif/linalg.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "cif/errors.hpp"

namespace cif {

namespace {

void check_square(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) throw ContractViolation("matrix must be square");
}

void check_info(lapack_int info, const char* routine) {
    if (info != 0) throw BuildFailure(std::string(routine) + " failed with info = " + std::to_string(info));
}

} // namespace

double hermitian_defect(const Eigen::MatrixXcd& a) {
    check_square(a);
    if (a.size() == 0) return 0.0;
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    double defect = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = j; i < a.rows(); ++i) defect = std::max(defect, std::abs(a(i, j) - std::conj(a(j, i))));
    return defect / scale;
}

bool effectively_real(const Eigen::MatrixXcd& a) {
    if (a.size() == 0) return true;
    const double scale = a.cwiseAbs().maxCoeff();
    return a.imag().cwiseAbs().maxCoeff() <= 1e-14 * scale;
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
    check_square(a);
    const auto n = static_cast<lapack_int>(a.rows());
    std::vector<double> w(static_cast<std::size_t>(n));
    if (n == 0) return w;
    if (effectively_real(a)) {
        Eigen::MatrixXd re = a.real();
        check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, re.data(), n, w.data()), "dsyevd");
    } else {
        Eigen::MatrixXcd work = a;
        check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data()), "zheevd");
    }
    std::sort(w.begin(), w.end(), std::greater<>{});
    return w;
}

HermitianEigen hermitian_eigensystem(const Eigen::MatrixXcd& a) {
    check_square(a);
    const auto n = static_cast<lapack_int>(a.rows());
    HermitianEigen out;
    out.values.assign(static_cast<std::size_t>(n), 0.0);
    if (n == 0) return out;
    if (effectively_real(a)) {
        Eigen::MatrixXd re = a.real();
        check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, re.data(), n, out.values.data()), "dsyevd");
        out.vectors = re.cast<std::complex<double>>();
    } else {
        out.vectors = a;
        check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n, out.values.data()),
                   "zheevd");
    }
    return out;
}

Eigen::MatrixXcd positive_part(const Eigen::MatrixXcd& a) {
    const auto eig = hermitian_eigensystem(a);
    const Eigen::Index n = a.rows();
    Eigen::VectorXd lam(n);
    for (Eigen::Index j = 0; j < n; ++j) lam(j) = std::max(eig.values[static_cast<std::size_t>(j)], 0.0);
    Eigen::MatrixXcd out = eig.vectors * lam.asDiagonal() * eig.vectors.adjoint();
    return 0.5 * (out + out.adjoint());
}

std::vector<double> singular_values(const Eigen::MatrixXcd& a) {
    const auto m = static_cast<lapack_int>(a.rows());
    const auto n = static_cast<lapack_int>(a.cols());
    std::vector<double> s(static_cast<std::size_t>(std::min(m, n)));
    if (s.empty()) return s;
    if (effectively_real(a)) {
        Eigen::MatrixXd re = a.real();
        check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, re.data(), m, s.data(), nullptr, 1, nullptr, 1),
                   "dgesdd");
    } else {
        Eigen::MatrixXcd work = a;
        check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(), nullptr, 1, nullptr, 1),
                   "zgesdd");
    }
    std::sort(s.begin(), s.end(), std::greater<>{});
    for (double& v : s) v = std::max(v, 0.0);
    return s;
}

std::vector<std::complex<double>> general_eigenvalues(const Eigen::MatrixXcd& a) {
    check_square(a);
    const auto n = static_cast<lapack_int>(a.rows());
    std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
    if (n == 0) return w;
    Eigen::MatrixXcd work = a;
    check_info(LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, w.data(), nullptr, 1, nullptr, 1),
               "zgeev");
    return w;
}

} // namespace cif

#pragma once

// Thin wrappers over LAPACK for the dense spectral work.  Matrices are Eigen
// column-major; every routine copies its input, so callers keep ownership.

#include <vector>

#include <Eigen/Dense>

namespace cif {

struct HermitianEigen {
    std::vector<double> values; // ascending, as LAPACK returns them
    Eigen::MatrixXcd vectors;   // column j pairs with values[j]
};

/// Largest |A - A^*| entry relative to the largest |A| entry (0 for a zero matrix).
double hermitian_defect(const Eigen::MatrixXcd& a);

/// True when every imaginary part is below 1e-14 of the largest entry; such
/// matrices go through the real symmetric solver.
bool effectively_real(const Eigen::MatrixXcd& a);

/// Eigenvalues of a Hermitian matrix, descending.  Only the lower triangle is read.
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& a);

/// Full eigen-decomposition of a Hermitian matrix.
HermitianEigen hermitian_eigensystem(const Eigen::MatrixXcd& a);

/// A_+ = V max(Lambda, 0) V^*.
Eigen::MatrixXcd positive_part(const Eigen::MatrixXcd& a);

/// Singular values, descending (LAPACK divide and conquer SVD).
std::vector<double> singular_values(const Eigen::MatrixXcd& a);

/// Eigenvalues of a general square matrix (unsorted).
std::vector<std::complex<double>> general_eigenvalues(const Eigen::MatrixXcd& a);

} // namespace cif

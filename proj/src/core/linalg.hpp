#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace magweyl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

// Symmetric square root of a symmetric positive definite matrix.
Mat spd_sqrt(const Mat& g);

bool is_symmetric(const Mat& a, double rel_tol);

// Pairwise (cascade) summation; order-deterministic.
double pairwise_sum(std::span<const double> values);

// Dense Hermitian eigensolver (LAPACK zheevd). `a` is column-major n x n and is
// overwritten by the eigenvectors when `vectors` is true. Eigenvalues ascending.
std::vector<double> hermitian_eigen(std::vector<cplx>& a, int n, bool vectors);

struct TridiagonalEigen {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column-major n x values.size()
};

// Eigenpairs of the real symmetric tridiagonal matrix (diag, offdiag) with
// eigenvalue <= upper (LAPACK dstevr, range by value).
TridiagonalEigen tridiagonal_eigen_below(std::vector<double> diag, std::vector<double> offdiag,
                                         double upper);

}  // namespace magweyl

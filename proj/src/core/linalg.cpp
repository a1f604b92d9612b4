#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <lapacke.h>

#include "core/errors.hpp"

namespace magweyl {

Mat spd_sqrt(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  if (es.info() != Eigen::Success) throw ComputationError("eigen decomposition of metric failed");
  if (es.eigenvalues().minCoeff() <= 0.0) throw InvalidArgument("metric is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

bool is_symmetric(const Mat& a, double rel_tol) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> hermitian_eigen(std::vector<cplx>& a, int n, bool vectors) {
  if (n == 0) return {};
  if (a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw InternalError("hermitian_eigen: storage size mismatch");
  std::vector<double> w(static_cast<std::size_t>(n));
  const int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n,
                                  reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
  if (info != 0) throw ComputationError("zheevd failed with info " + std::to_string(info));
  return w;
}

TridiagonalEigen tridiagonal_eigen_below(std::vector<double> diag, std::vector<double> offdiag,
                                         double upper) {
  const int n = static_cast<int>(diag.size());
  TridiagonalEigen out;
  if (n == 0) return out;
  // Gershgorin lower bound keeps the value range finite.
  double lower = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(offdiag[i - 1]);
    if (i + 1 < n) r += std::abs(offdiag[i]);
    lower = std::min(lower, diag[i] - r);
  }
  if (upper < lower) return out;
  lower -= 1.0 + std::abs(lower) * 1e-12;
  offdiag.resize(static_cast<std::size_t>(std::max(n, 1)));
  int m = 0;
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  const int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'V', n, diag.data(), offdiag.data(), lower,
                                  upper, 0, 0, 0.0, &m, w.data(), z.data(), n, isuppz.data());
  if (info != 0) throw ComputationError("dstevr failed with info " + std::to_string(info));
  out.values.assign(w.begin(), w.begin() + m);
  out.vectors.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(m) * n);
  return out;
}

}  // namespace magweyl

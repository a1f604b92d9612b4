#include "core/profile_ldlt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace magweyl {

ProfileMatrix::ProfileMatrix(std::vector<std::size_t> first) : first_(std::move(first)) {
  offset_.resize(first_.size() + 1);
  std::size_t total = 0;
  for (std::size_t i = 0; i < first_.size(); ++i) {
    if (first_[i] > i) throw InternalError("profile row starts after the diagonal");
    offset_[i] = total;
    total += i - first_[i] + 1;
  }
  offset_[first_.size()] = total;
  values_.assign(total, 0.0);
}

double& ProfileMatrix::at(std::size_t i, std::size_t j) {
  if (j > i || j < first_[i]) throw InternalError("profile access outside the envelope");
  return values_[offset_[i] + (j - first_[i])];
}

double ProfileMatrix::get(std::size_t i, std::size_t j) const {
  if (j > i || j < first_[i]) return 0.0;
  return values_[offset_[i] + (j - first_[i])];
}

LdltInertia ldlt_inertia(ProfileMatrix a, double breakdown_threshold) {
  const std::size_t n = a.size();
  std::vector<double> D(n);
  std::vector<double> w;
  LdltInertia out;
  out.min_abs_pivot = std::numeric_limits<double>::infinity();
  double amax = 0.0, big = 0.0;
  for (double v : a.values_) amax = std::max(amax, std::abs(v));
  if (amax == 0.0) amax = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t fi = a.first_[i];
    double* row = a.values_.data() + a.offset_[i];  // row[k - fi], k in [fi, i]
    w.assign(row, row + (i - fi));
    // w_j = A_ij - sum_k w_k L_jk, then L_ij = w_j / D_j
    for (std::size_t j = fi; j < i; ++j) {
      const std::size_t fj = a.first_[j];
      const std::size_t k0 = std::max(fi, fj);
      const double* lj = a.values_.data() + a.offset_[j];
      double s = 0.0;
      for (std::size_t k = k0; k < j; ++k) s += w[k - fi] * lj[k - fj];
      w[j - fi] -= s;
    }
    double diag = row[i - fi];
    for (std::size_t k = fi; k < i; ++k) {
      big = std::max(big, std::abs(w[k - fi]));
      const double l = w[k - fi] / D[k];
      diag -= w[k - fi] * l;
      row[k - fi] = l;
    }
    D[i] = diag;
    const double ad = std::abs(diag);
    big = std::max(big, ad);
    out.growth = big / amax;
    out.min_abs_pivot = std::min(out.min_abs_pivot, ad);
    out.max_abs_pivot = std::max(out.max_abs_pivot, ad);
    if (!(ad > breakdown_threshold)) {
      out.breakdown = true;
      return out;
    }
    (diag < 0.0 ? out.negative : out.positive)++;
  }
  return out;
}

}  // namespace magweyl

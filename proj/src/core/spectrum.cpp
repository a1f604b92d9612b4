#include "core/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/errors.hpp"
#include "core/profile_ldlt.hpp"

namespace magweyl {

namespace {

constexpr double kPivotBreakdown = 1e-13;
constexpr double kJitter = 1e-10;
constexpr double kInvariance = 1e-12;

void check_hermitian(const DiscreteHamiltonian& H) {
  if (H.hermiticity_defect() > kInvariance * std::max(1.0, H.norm_bound()))
    throw InternalError("discrete Hamiltonian is not Hermitian");
}

// Position of index i along an axis: periodic axes are folded (0, n-1, 1, n-2, ...)
// so that wrap-around links stay inside the band.
int folded(int i, int n) { return i < (n + 1) / 2 ? 2 * i : 2 * (n - 1 - i) + 1; }

std::vector<std::size_t> inertia_ordering(const Lattice& lat) {
  const std::size_t N = lat.size();
  std::vector<std::size_t> pos(N);
  for (std::size_t s = 0; s < N; ++s) {
    auto idx = lat.unravel(s);
    for (int a = 0; a < lat.dimension(); ++a)
      if (lat.boundary[a] == Boundary::Periodic) idx[a] = folded(idx[a], lat.n[a]);
    pos[s] = lat.ravel(idx);
  }
  return pos;
}

LdltInertia factor_shifted(const DiscreteHamiltonian& H, double tau, const std::vector<std::size_t>& pos,
                           std::size_t* envelope) {
  const std::size_t N = H.size();
  // Real embedding [[Re, -Im], [Im, Re]] interleaved per site: rows 2p, 2p+1.
  std::vector<std::size_t> first(2 * N);
  for (std::size_t p = 0; p < 2 * N; ++p) first[p] = p;
  for (std::size_t s = 0; s < N; ++s) {
    std::size_t lo = pos[s];
    for (const auto& e : H.rows[s]) lo = std::min(lo, pos[e.col]);
    first[2 * pos[s]] = 2 * lo;
    first[2 * pos[s] + 1] = 2 * lo;
  }
  ProfileMatrix A(std::move(first));
  for (std::size_t s = 0; s < N; ++s) {
    const std::size_t i = pos[s];
    for (const auto& e : H.rows[s]) {
      const std::size_t j = pos[e.col];
      if (j > i) continue;
      const double re = e.value.real() - (j == i ? tau : 0.0);
      const double im = e.value.imag();
      // block rows (2i, 2i+1), cols (2j, 2j+1): [[re, -im], [im, re]]
      A.at(2 * i, 2 * j) = re;
      A.at(2 * i + 1, 2 * j + 1) = re;
      A.at(2 * i + 1, 2 * j) = im;
      if (j < i) A.at(2 * i, 2 * j + 1) = -im;
    }
  }
  if (envelope) *envelope = A.envelope();
  return ldlt_inertia(std::move(A), kPivotBreakdown * std::max(1.0, H.norm_bound()));
}

CountResult count_inertia(const DiscreteHamiltonian& H, double tau) {
  const auto pos = inertia_ordering(H.lattice);
  const double scale = std::max(1.0, H.norm_bound());
  CountResult res;
  res.method = CountMethod::Inertia;
  for (double jitter : {0.0, kJitter * scale, -kJitter * scale}) {
    std::size_t env = 0;
    const LdltInertia in = factor_shifted(H, tau + jitter, pos, &env);
    // Each eigenvalue appears twice in the real embedding; an odd count means
    // tau sits on an eigenvalue to rounding, so retry at a shifted tau.
    if (in.breakdown || in.negative % 2 != 0) continue;
    res.count = in.negative / 2;
    res.jitter = jitter;
    res.diagnostics.min_abs_pivot = in.min_abs_pivot;
    res.diagnostics.max_abs_pivot = in.max_abs_pivot;
    res.diagnostics.pivot_growth = in.growth;
    res.diagnostics.negative_pivots = in.negative;
    res.diagnostics.envelope = env;
    return res;
  }
  throw ComputationError("LDL^T factorization broke down at tau and both jittered shifts", "tau");
}

std::vector<double> dense_eigenvalues(const DiscreteHamiltonian& H, std::size_t budget,
                                      std::vector<cplx>* vectors) {
  if (H.size() > budget)
    throw BudgetExceeded("matrix size " + std::to_string(H.size()) + " exceeds the dense budget " +
                             std::to_string(budget),
                         "n");
  check_hermitian(H);
  std::vector<cplx> a = H.dense();
  auto w = hermitian_eigen(a, static_cast<int>(H.size()), vectors != nullptr);
  if (vectors) *vectors = std::move(a);
  return w;
}

struct BlochBlocks {
  int axis = 0;
  int stride = 1;
  int sectors = 1;                 // n / stride
  std::size_t m = 0;               // block dimension: stride * sites per slice
  std::vector<std::size_t> slice;  // block index -> site with idx[axis] < stride
  std::vector<std::size_t> local;  // site -> block index of its representative
  std::vector<int> cell;           // site -> idx[axis] / stride
};

BlochBlocks bloch_layout(const Lattice& lat, const BlochSymmetry& sym) {
  BlochBlocks b;
  b.axis = sym.axis;
  b.stride = sym.stride;
  b.sectors = lat.n[sym.axis] / sym.stride;
  b.m = lat.size() / static_cast<std::size_t>(b.sectors);
  b.local.resize(lat.size());
  b.cell.resize(lat.size());
  b.slice.resize(b.m);
  for (std::size_t s = 0; s < lat.size(); ++s) {
    auto idx = lat.unravel(s);
    const int v = idx[sym.axis] % sym.stride;
    b.cell[s] = idx[sym.axis] / sym.stride;
    // block index: v fastest, then the remaining axes lexicographically
    std::size_t p = 0;
    for (int a = lat.dimension() - 1; a >= 0; --a) {
      if (a == sym.axis) continue;
      p = p * static_cast<std::size_t>(lat.n[a]) + idx[a];
    }
    b.local[s] = p * static_cast<std::size_t>(sym.stride) + v;
    if (b.cell[s] == 0) b.slice[b.local[s]] = s;
  }
  return b;
}

// Hermitian block H_q(k, k') = sum_u H(slice k, cell u of k') exp(i 2 pi q u / K), column-major.
std::vector<cplx> bloch_block(const DiscreteHamiltonian& H, const BlochBlocks& b, int q) {
  std::vector<cplx> blk(b.m * b.m, 0.0);
  for (std::size_t k = 0; k < b.m; ++k)
    for (const auto& e : H.rows[b.slice[k]])
      blk[b.local[e.col] * b.m + k] +=
          e.value * std::exp(cplx(0.0, 2.0 * M_PI * q * b.cell[e.col] / b.sectors));
  return blk;
}

bool is_tridiagonal(const std::vector<cplx>& blk, std::size_t m) {
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i)
      if ((i > j + 1 || j > i + 1) && blk[j * m + i] != cplx(0.0)) return false;
  return true;
}

struct BlockSpectrum {
  std::vector<double> values;
  std::vector<double> weights;  // |phi(p)|^2 per eigenvector, m per value (when requested)
};

// Eigenpairs of one Hermitian block with lambda <= upper (all when upper is empty).
BlockSpectrum block_spectrum(std::vector<cplx> blk, std::size_t m, std::optional<double> upper,
                             bool want_weights) {
  BlockSpectrum out;
  if (is_tridiagonal(blk, m) && upper) {
    // A diagonal phase gauge makes the off-diagonal real and nonnegative.
    std::vector<double> diag(m), off(m > 0 ? m - 1 : 0);
    for (std::size_t k = 0; k < m; ++k) diag[k] = blk[k * m + k].real();
    for (std::size_t k = 0; k + 1 < m; ++k) off[k] = std::abs(blk[(k + 1) * m + k]);
    TridiagonalEigen te = tridiagonal_eigen_below(std::move(diag), std::move(off), *upper);
    out.values = te.values;
    if (want_weights) {
      out.weights.resize(te.vectors.size());
      for (std::size_t i = 0; i < te.vectors.size(); ++i) out.weights[i] = te.vectors[i] * te.vectors[i];
    }
    return out;
  }
  auto w = hermitian_eigen(blk, static_cast<int>(m), want_weights);
  std::size_t keep = w.size();
  if (upper) keep = static_cast<std::size_t>(std::upper_bound(w.begin(), w.end(), *upper) - w.begin());
  out.values.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(keep));
  if (want_weights) {
    out.weights.resize(keep * m);
    for (std::size_t i = 0; i < keep * m; ++i) out.weights[i] = std::norm(blk[i]);
  }
  return out;
}

std::vector<double> bloch_eigenvalues(const DiscreteHamiltonian& H, const BlochSymmetry& sym,
                                      std::optional<double> upper) {
  const BlochBlocks b = bloch_layout(H.lattice, sym);
  std::vector<double> all;
  for (int q = 0; q < b.sectors; ++q) {
    auto bs = block_spectrum(bloch_block(H, b, q), b.m, upper, false);
    all.insert(all.end(), bs.values.begin(), bs.values.end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<double> cutoff_samples(const DiscreteHamiltonian& H, const CutoffFunction& psi) {
  const Lattice& lat = H.lattice;
  std::vector<double> v(lat.size());
  for (std::size_t s = 0; s < lat.size(); ++s) v[s] = psi(lat.position(lat.unravel(s)));
  return v;
}

}  // namespace

CountMethod parse_count_method(const std::string& name) {
  if (name == "dense") return CountMethod::Dense;
  if (name == "inertia") return CountMethod::Inertia;
  if (name == "bloch") return CountMethod::Bloch;
  if (name == "auto") return CountMethod::Auto;
  throw InvalidArgument("unknown count method '" + name + "'", "method");
}

std::string count_method_name(CountMethod m) {
  switch (m) {
    case CountMethod::Dense: return "dense";
    case CountMethod::Inertia: return "inertia";
    case CountMethod::Bloch: return "bloch";
    case CountMethod::Auto: return "auto";
  }
  return "auto";
}

EigenMethod parse_eigen_method(const std::string& name) {
  if (name == "dense") return EigenMethod::Dense;
  if (name == "bloch") return EigenMethod::Bloch;
  if (name == "auto") return EigenMethod::Auto;
  throw InvalidArgument("unknown eigen method '" + name + "'", "method");
}

std::optional<BlochSymmetry> bloch_symmetry(const DiscreteHamiltonian& H) {
  const Lattice& lat = H.lattice;
  const double tol = kInvariance * std::max(1.0, H.norm_bound());
  std::optional<BlochSymmetry> best;
  std::size_t best_size = H.size();
  for (int a = 0; a < lat.dimension(); ++a) {
    if (lat.boundary[a] != Boundary::Periodic) continue;
    const int n = lat.n[a];
    for (int t = 1; t < n; ++t) {
      if (n % t != 0) continue;
      const std::size_t size = H.size() / static_cast<std::size_t>(n / t);
      if (size >= best_size) break;
      auto shift = [&](std::size_t s) {
        auto idx = lat.unravel(s);
        idx[a] = (idx[a] + t) % n;
        return lat.ravel(idx);
      };
      bool ok = true;
      for (std::size_t s = 0; s < H.size() && ok; ++s) {
        const std::size_t ms = shift(s);
        if (H.rows[s].size() != H.rows[ms].size()) {
          ok = false;
          break;
        }
        for (const auto& e : H.rows[s])
          if (std::abs(H.entry(ms, shift(e.col)) - e.value) > tol) {
            ok = false;
            break;
          }
      }
      if (ok) {
        best = BlochSymmetry{a, t};
        best_size = size;
        break;
      }
    }
  }
  return best;
}

CountResult count_below(const DiscreteHamiltonian& H, double tau, CountMethod method,
                        std::size_t dense_budget) {
  require(std::isfinite(tau), "tau must be finite", "tau");
  std::optional<BlochSymmetry> axis;
  if (method == CountMethod::Auto || method == CountMethod::Bloch) {
    axis = bloch_symmetry(H);
    if (!axis && method == CountMethod::Bloch)
      throw InvalidArgument("operator has no translation-invariant periodic axis", "method");
    if (method == CountMethod::Auto) method = axis ? CountMethod::Bloch : CountMethod::Inertia;
  }
  if (method == CountMethod::Inertia) return count_inertia(H, tau);

  CountResult res;
  res.method = method;
  std::vector<double> w;
  if (method == CountMethod::Dense) {
    w = dense_eigenvalues(H, dense_budget, nullptr);
  } else {
    w = bloch_eigenvalues(H, *axis, std::nullopt);
    res.diagnostics.bloch_axis = axis->axis;
    res.diagnostics.bloch_stride = axis->stride;
  }
  res.count = std::upper_bound(w.begin(), w.end(), tau) - w.begin();
  if (!w.empty()) {
    res.diagnostics.min_eigenvalue = w.front();
    res.diagnostics.max_eigenvalue = w.back();
    double dist = std::numeric_limits<double>::infinity();
    for (double v : w) dist = std::min(dist, std::abs(v - tau));
    res.diagnostics.distance_to_tau = dist;
  }
  return res;
}

std::vector<double> eigenvalues(const DiscreteHamiltonian& H, EigenMethod method, std::optional<double> upper,
                                std::size_t dense_budget) {
  if (method != EigenMethod::Dense) {
    const auto axis = bloch_symmetry(H);
    if (axis) return bloch_eigenvalues(H, *axis, upper);
    if (method == EigenMethod::Bloch)
      throw InvalidArgument("operator has no translation-invariant periodic axis", "method");
  }
  auto w = dense_eigenvalues(H, dense_budget, nullptr);
  if (upper) w.erase(std::upper_bound(w.begin(), w.end(), *upper), w.end());
  return w;
}

double local_trace(const DiscreteHamiltonian& H, double tau, const CutoffFunction& psi, EigenMethod method,
                   std::size_t dense_budget) {
  require(std::isfinite(tau), "tau must be finite", "tau");
  psi.validate(H.lattice.domain);
  const std::vector<double> weight = cutoff_samples(H, psi);
  const Lattice& lat = H.lattice;

  std::optional<BlochSymmetry> axis;
  if (method != EigenMethod::Dense) {
    axis = bloch_symmetry(H);
    if (!axis && method == EigenMethod::Bloch)
      throw InvalidArgument("operator has no translation-invariant periodic axis", "method");
  }
  if (axis) {
    const BlochBlocks b = bloch_layout(lat, *axis);
    // psi averaged over the cells of the Bloch axis, per block index
    std::vector<double> mean(b.m, 0.0);
    for (std::size_t s = 0; s < lat.size(); ++s) mean[b.local[s]] += weight[s] / b.sectors;
    std::vector<double> terms;
    for (int q = 0; q < b.sectors; ++q) {
      const auto bs = block_spectrum(bloch_block(H, b, q), b.m, tau, true);
      std::vector<double> per;
      for (std::size_t k = 0; k < bs.values.size(); ++k) {
        double acc = 0.0;
        for (std::size_t p = 0; p < b.m; ++p) acc += mean[p] * bs.weights[k * b.m + p];
        per.push_back(acc);
      }
      terms.push_back(pairwise_sum(per));
    }
    return pairwise_sum(terms);
  }

  std::vector<cplx> vec;
  const auto w = dense_eigenvalues(H, dense_budget, &vec);
  const std::size_t N = H.size();
  std::vector<double> terms;
  for (std::size_t k = 0; k < w.size() && w[k] <= tau; ++k) {
    double acc = 0.0;
    for (std::size_t n = 0; n < N; ++n) acc += weight[n] * std::norm(vec[k * N + n]);
    terms.push_back(acc);
  }
  return pairwise_sum(terms);
}

}  // namespace magweyl

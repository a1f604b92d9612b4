#include "core/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "core/errors.hpp"

namespace magweyl {

namespace {

constexpr double kQuantTol = 1e-8;

class Assembler {
 public:
  Assembler(const Scenario& s, double mu, double h, const Lattice& lat)
      : s_(s), lat_(lat), k_(mu / h), d_(lat.dimension()) {
    rows_.resize(lat.size());
    if (s.affine_gauge) slope_ = s.affine_gauge->slope;
  }

  // Resolves a possibly out-of-range index to a site and the factor relating
  // the extended value to the stored one; empty for Dirichlet exterior points.
  std::optional<std::pair<std::size_t, cplx>> resolve(std::vector<int> idx) const {
    cplx factor = 1.0;
    for (int a = 0; a < d_; ++a) {
      const int n = lat_.n[a];
      if (idx[a] >= 0 && idx[a] < n) continue;
      if (lat_.boundary[a] == Boundary::Dirichlet) return std::nullopt;
      const double T = lat_.domain.upper(a) - lat_.domain.lower(a);
      while (idx[a] >= n) {
        // psi(z + T) = exp(i k chi_T(z)) psi(z) with z the reduced point
        idx[a] -= n;
        factor *= std::exp(cplx(0.0, k_ * chi(a, T, position(idx))));
      }
      while (idx[a] < 0) {
        // psi(z - T) = exp(-i k chi_T(z - T)) psi(z)
        idx[a] += n;
        Vec z = position(idx);
        z(a) -= T;
        factor *= std::exp(cplx(0.0, -k_ * chi(a, T, z)));
      }
    }
    return std::make_pair(lat_.ravel(idx), factor);
  }

  // Forward covariant difference D_a^+ at extended index m as (site, weight) terms.
  std::vector<std::pair<std::size_t, cplx>> forward(const std::vector<int>& m, int a) const {
    std::vector<std::pair<std::size_t, cplx>> out;
    const double dx = lat_.spacing(a);
    Vec mid = position(m);
    mid(a) += 0.5 * dx;
    const cplx U = std::exp(cplx(0.0, -k_ * dx * s_.vector_potential(mid)(a)));
    std::vector<int> mp = m;
    ++mp[a];
    if (auto r = resolve(mp)) out.emplace_back(r->first, U * r->second / dx);
    if (auto r = resolve(m)) out.emplace_back(r->first, r->second * (-1.0 / dx));
    return out;
  }

  // Adds c * conj(L1 psi) (L2 psi) to the quadratic form.
  void add_form(double c, const std::vector<std::pair<std::size_t, cplx>>& l1,
                const std::vector<std::pair<std::size_t, cplx>>& l2) {
    for (const auto& [i, wi] : l1)
      for (const auto& [j, wj] : l2) add(i, j, c * std::conj(wi) * wj);
  }

  void add(std::size_t i, std::size_t j, cplx v) {
    auto& row = rows_[i];
    for (auto& e : row)
      if (e.col == j) {
        e.value += v;
        return;
      }
    row.push_back({j, v});
  }

  Vec position(const std::vector<int>& idx) const { return lat_.position(idx); }

  double chi(int a, double T, const Vec& z) const {
    if (!slope_) return 0.0;
    return T * slope_->col(a).dot(z);
  }

  void run(double h2) {
    const std::size_t N = lat_.size();
    std::vector<int> lo(d_), hi(d_);
    for (int a = 0; a < d_; ++a) {
      lo[a] = lat_.boundary[a] == Boundary::Dirichlet ? -1 : 0;
      hi[a] = lat_.n[a];  // exclusive
    }
    // Diagonal metric part: one term per link.
    for (int a = 0; a < d_; ++a) {
      std::vector<int> m = lo;
      while (true) {
        Vec mid = position(m);
        mid(a) += 0.5 * lat_.spacing(a);
        bool skip = false;
        for (int b = 0; b < d_; ++b)
          if (b != a && (m[b] < 0)) skip = true;
        if (!skip) {
          const double g = s_.metric(mid)(a, a);
          const auto D = forward(m, a);
          add_form(h2 * g, D, D);
        }
        if (!next(m, lo, hi)) break;
      }
    }
    // Cross terms: average of forward-forward and backward-backward products.
    for (int a = 0; a < d_; ++a)
      for (int b = 0; b < d_; ++b) {
        if (a == b) continue;
        std::vector<int> m = lo;
        while (true) {
          Vec x = position(m);
          Vec pf = x, pb = x;
          pf(a) += 0.5 * lat_.spacing(a);
          pf(b) += 0.5 * lat_.spacing(b);
          pb(a) -= 0.5 * lat_.spacing(a);
          pb(b) -= 0.5 * lat_.spacing(b);
          const double gf = s_.metric(pf)(a, b);
          if (gf != 0.0) add_form(0.5 * h2 * gf, forward(m, a), forward(m, b));
          const double gb = s_.metric(pb)(a, b);
          if (gb != 0.0) {
            std::vector<int> ma = m, mb = m;
            --ma[a];
            --mb[b];
            add_form(0.5 * h2 * gb, forward(ma, a), forward(mb, b));
          }
          if (!next(m, lo, hi, 1)) break;
        }
      }
    for (std::size_t i = 0; i < N; ++i) add(i, i, s_.scalar_potential(position(lat_.unravel(i))));
  }

  std::vector<std::vector<SparseEntry>> take() { return std::move(rows_); }

 private:
  // Advances m over [lo, hi + extra) lexicographically.
  bool next(std::vector<int>& m, const std::vector<int>& lo, const std::vector<int>& hi,
            int extra = 0) const {
    for (int a = 0; a < d_; ++a) {
      const int top = hi[a] + (lat_.boundary[a] == Boundary::Dirichlet ? extra : 0);
      if (++m[a] < top) return true;
      m[a] = lo[a];
    }
    return false;
  }

  const Scenario& s_;
  const Lattice& lat_;
  double k_;
  int d_;
  std::optional<Mat> slope_;
  std::vector<std::vector<SparseEntry>> rows_;
};

void check_periodic_gauge(const Scenario& s, const Lattice& lat, double k) {
  const int d = lat.dimension();
  std::vector<int> periodic;
  for (int a = 0; a < d; ++a)
    if (lat.boundary[a] == Boundary::Periodic) periodic.push_back(a);
  if (periodic.empty()) return;
  if (!s.affine_gauge) {
    for (int a : periodic) {
      const double T = lat.domain.upper(a) - lat.domain.lower(a);
      for (const Vec& x : sample_grid(lat.domain, 3)) {
        Vec y = x;
        y(a) += T;
        if ((s.vector_potential(y) - s.vector_potential(x)).cwiseAbs().maxCoeff() >
            1e-10 * std::max(1.0, s.vector_potential(x).cwiseAbs().maxCoeff()))
          throw InvalidArgument("vector potential is not periodic along a periodic axis", "bc");
      }
    }
    return;
  }
  if (!s.constant_metric)
    throw InvalidArgument("periodic axes need a constant metric", "bc");
  const Mat& L = s.affine_gauge->slope;
  const Mat F = L.transpose() - L;
  for (std::size_t i = 0; i < periodic.size(); ++i)
    for (std::size_t j = i + 1; j < periodic.size(); ++j) {
      const int a = periodic[i], b = periodic[j];
      const double Ta = lat.domain.upper(a) - lat.domain.lower(a);
      const double Tb = lat.domain.upper(b) - lat.domain.lower(b);
      const double phase = k * F(a, b) * Ta * Tb;
      const double turns = phase / (2.0 * M_PI);
      if (std::abs(turns - std::round(turns)) > kQuantTol * std::max(1.0, std::abs(turns))) {
        std::ostringstream msg;
        msg << "flux quantization violated on axes (" << a + 1 << "," << b + 1 << "): flux/2pi = " << turns;
        throw InvalidArgument(msg.str(), "bc");
      }
    }
}

}  // namespace

std::size_t DiscreteHamiltonian::nonzeros() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

cplx DiscreteHamiltonian::entry(std::size_t i, std::size_t j) const {
  for (const auto& e : rows[i])
    if (e.col == j) return e.value;
  return 0.0;
}

double DiscreteHamiltonian::norm_bound() const {
  double m = 0.0;
  for (const auto& r : rows) {
    double s = 0.0;
    for (const auto& e : r) s += std::abs(e.value);
    m = std::max(m, s);
  }
  return m;
}

double DiscreteHamiltonian::hermiticity_defect() const {
  double m = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& e : rows[i]) m = std::max(m, std::abs(e.value - std::conj(entry(e.col, i))));
  return m;
}

std::vector<cplx> DiscreteHamiltonian::dense() const {
  const std::size_t n = size();
  std::vector<cplx> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& e : rows[i]) a[e.col * n + i] = e.value;
  return a;
}

DiscreteHamiltonian assemble(const Scenario& s, double mu, double h, const Lattice& lattice) {
  require(std::isfinite(mu) && mu >= 0.0, "mu must be nonnegative", "mu");
  require(std::isfinite(h) && h > 0.0, "h must be positive", "h");
  lattice.validate();
  require(lattice.dimension() == s.dimension, "lattice and scenario dimensions differ", "lattice");
  const double k = mu / h;
  check_periodic_gauge(s, lattice, k);

  DiscreteHamiltonian H;
  H.scenario = s;
  H.lattice = lattice;
  H.mu = mu;
  H.h = h;

  // Aliasing and resolution diagnostics from the field at the domain centre.
  const Vec centre = 0.5 * (s.domain.lower + s.domain.upper);
  const FieldIntensity in = intensity_matrix(s, centre);
  const int d = s.dimension;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      const double flux = std::abs(k * in.F(a, b) * lattice.spacing(a) * lattice.spacing(b));
      if (flux >= M_PI)
        throw ComputationError("flux per plaquette reaches pi: lattice too coarse (aliasing)", "n");
    }
  if (!in.frequencies.empty() && mu > 0.0) {
    const double ell = std::sqrt(h / (mu * in.frequencies.front()));
    for (int a = 0; a < d; ++a)
      if (lattice.spacing(a) > 0.5 * ell) {
        H.warnings.push_back("lattice spacing exceeds half the magnetic length on axis " +
                             std::to_string(a + 1));
        break;
      }
  }

  Assembler asmb(s, mu, h, lattice);
  asmb.run(h * h);
  H.rows = asmb.take();
  for (auto& r : H.rows)
    std::sort(r.begin(), r.end(), [](const SparseEntry& x, const SparseEntry& y) { return x.col < y.col; });
  // Enforce exact Hermiticity: H = (H + H*) / 2.
  for (std::size_t i = 0; i < H.rows.size(); ++i)
    for (auto& e : H.rows[i]) {
      if (e.col < i) continue;
      if (e.col == i) {
        e.value = e.value.real();
        continue;
      }
      cplx* back = nullptr;
      for (auto& f : H.rows[e.col])
        if (f.col == i) back = &f.value;
      if (!back) throw InternalError("assembled matrix is not structurally symmetric");
      const cplx avg = 0.5 * (e.value + std::conj(*back));
      e.value = avg;
      *back = std::conj(avg);
    }
  return H;
}

}  // namespace magweyl

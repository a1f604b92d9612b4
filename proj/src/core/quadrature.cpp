#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "core/errors.hpp"
#include "core/weyl.hpp"

namespace magweyl {

namespace {

constexpr double kTieTol = 1e-13;

double tie_slack(double tau, double v) {
  return kTieTol * std::max({1.0, std::abs(tau), std::abs(v)});
}

// P(sum c_a u_a <= t) for independent u_a ~ U[0,1] and c_a > 0.
double uniform_sum_cdf(const std::vector<double>& c, double t) {
  const double total = std::accumulate(c.begin(), c.end(), 0.0);
  if (t <= 0.0) return 0.0;
  if (t >= total) return 1.0;
  // The distribution is symmetric about total/2; evaluate on the short side.
  if (t > 0.5 * total) return 1.0 - uniform_sum_cdf(c, total - t);
  const int k = static_cast<int>(c.size());
  double denom = 1.0;
  for (int i = 1; i <= k; ++i) denom *= i * c[i - 1];
  double acc = 0.0;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    double shift = 0.0;
    int bits = 0;
    for (int a = 0; a < k; ++a)
      if (mask & (1u << a)) {
        shift += c[a];
        ++bits;
      }
    const double arg = t - shift;
    if (arg <= 0.0) continue;
    const double term = std::pow(arg, k);
    acc += (bits % 2 ? -term : term);
  }
  return std::clamp(acc / denom, 0.0, 1.0);
}

struct Point {
  double value = 0.0;  // density at the point (psi not applied)
  int levels = 0;      // number of active terms
};

class DensityEvaluator {
 public:
  DensityEvaluator(DensityKind kind, const Scenario& s, const WeylParams& p)
      : kind_(kind), s_(s), p_(p) {
    if (s.constant_field()) {
      const Vec c = 0.5 * (s.domain.lower + s.domain.upper);
      cached_ = intensity_matrix(s, c);
    }
  }

  FieldIntensity field(const Vec& x) const { return cached_ ? *cached_ : intensity_matrix(s_, x); }

  Point at(const Vec& x) const {
    const double V = s_.scalar_potential(x);
    const double mh = p_.mu * p_.h;
    switch (kind_) {
      case DensityKind::Standard: {
        const double v = standard_weyl(s_, x, p_);
        return {v, p_.tau - V > 0.0 ? 1 : 0};
      }
      case DensityKind::MagneticGeneral: {
        const FieldIntensity in = field(x);
        const auto n = in.frequencies.empty()
                           ? (p_.tau - V > 0.0 ? 1 : 0)
                           : count_levels(in.frequencies, (p_.tau - V + tie_slack(p_.tau, V)) / mh);
        return {magnetic_weyl_general(s_, x, p_), static_cast<int>(n)};
      }
      case DensityKind::MagneticFullRank: {
        const FieldIntensity in = field(x);
        const int r = static_cast<int>(in.frequencies.size());
        if (2 * r != in.dimension()) throw ComputationError("rank deficient intensity matrix", "scenario");
        const auto n = count_levels(in.frequencies, (p_.tau - V + tie_slack(p_.tau, V)) / mh);
        return {prefactor(in) * static_cast<double>(n), static_cast<int>(n)};
      }
    }
    return {};
  }

  // (2 pi)^{-r} (mu/h)^r f_1..f_r sqrt(g)
  double prefactor(const FieldIntensity& in) const {
    const int r = static_cast<int>(in.frequencies.size());
    return std::pow(2.0 * M_PI, -r) * std::pow(p_.mu / p_.h, r) * in.frequency_product() /
           std::sqrt(in.metric.determinant());
  }

  // Full-rank density averaged over the cell centre +- w, using the exact
  // volume fraction of each linearized level surface.
  double cell_average(const Vec& c, const Vec& w) const {
    const int d = s_.dimension;
    const FieldIntensity in = field(c);
    const auto& f = in.frequencies;
    const int r = static_cast<int>(f.size());
    const double V = s_.scalar_potential(c);
    const Vec gV = scalar_gradient(s_, c);
    const double mh = p_.mu * p_.h;

    std::vector<Vec> gf(static_cast<std::size_t>(r), Vec::Zero(d));
    if (!cached_) {
      for (int a = 0; a < d; ++a) {
        Vec xp = c, xm = c;
        xp(a) += w(a);
        xm(a) -= w(a);
        const auto fp = intensity_matrix(s_, xp).frequencies;
        const auto fm = intensity_matrix(s_, xm).frequencies;
        for (int j = 0; j < r; ++j) gf[j](a) = (fp[j] - fm[j]) / (2.0 * w(a));
      }
    }
    double rho = 0.0;
    for (int j = 0; j < r; ++j) rho = std::max(rho, gf[j].cwiseAbs().dot(w) / f[j]);
    if (rho >= 0.5) return at(c).value;

    const double reach = gV.cwiseAbs().dot(w);
    const double slack = tie_slack(p_.tau, V);
    const double cap = (p_.tau - V + reach + slack) / (mh * (1.0 - rho));
    std::vector<double> fractions;
    for_each_level(f, cap, [&](const std::vector<int>& alpha, double e) {
      Vec grad = -gV;
      for (int j = 0; j < r; ++j) grad -= mh * (2.0 * alpha[j] + 1.0) * gf[j];
      fractions.push_back(box_fraction(p_.tau - e * mh - V + slack, grad, w));
    });
    return prefactor(in) * pairwise_sum(fractions);
  }

  DensityKind kind() const { return kind_; }

 private:
  DensityKind kind_;
  const Scenario& s_;
  WeylParams p_;
  std::optional<FieldIntensity> cached_;
};

}  // namespace

double box_fraction(double s0, const Vec& grad, const Vec& half_width) {
  double cmax = 0.0;
  for (Eigen::Index a = 0; a < grad.size(); ++a) cmax = std::max(cmax, 2.0 * std::abs(grad(a)) * half_width(a));
  std::vector<double> c;
  double low = s0;  // minimum of s0 + grad . y over the box, up to dropped axes
  for (Eigen::Index a = 0; a < grad.size(); ++a) {
    const double ca = 2.0 * std::abs(grad(a)) * half_width(a);
    if (ca <= 1e-7 * cmax || ca == 0.0) continue;
    c.push_back(ca);
    low -= 0.5 * ca;
  }
  if (c.empty()) return s0 >= 0.0 ? 1.0 : 0.0;
  // s0 + grad . y = low + sum c_a u_a; fraction where this is >= 0.
  return 1.0 - uniform_sum_cdf(c, -low);
}

namespace {

IntegralResult integrate_once(DensityKind kind, const Scenario& s, const CutoffFunction& psi,
                              const WeylParams& p, const QuadratureSpec& q) {
  const int d = s.dimension;
  const int n = q.base_resolution;
  const int m = q.refine_factor;

  const double cells_d = std::pow(static_cast<double>(n), d);
  const double corners_d = std::pow(static_cast<double>(n + 1), d);
  if (cells_d + corners_d > static_cast<double>(q.budget))
    throw BudgetExceeded("quadrature cell count exceeds the budget", "resolution");
  const auto cells = static_cast<std::size_t>(cells_d);
  const auto ncorner = static_cast<std::size_t>(corners_d);
  const std::size_t sub_per_cell = static_cast<std::size_t>(std::pow(m, d));

  const Box S = psi.support(s.domain);
  const Vec step = S.extent() / n;
  const double cell_vol = step.prod();
  DensityEvaluator eval(kind, s, p);

  std::vector<int> corner_levels(ncorner);
  {
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Vec x(d);
    for (std::size_t k = 0; k < ncorner; ++k) {
      for (int a = 0; a < d; ++a) x(a) = S.lower(a) + idx[a] * step(a);
      corner_levels[k] = eval.at(x).levels;
      for (int a = 0; a < d && ++idx[a] == n + 1; ++a) idx[a] = 0;
    }
  }

  IntegralResult res;
  res.cells = cells;
  std::vector<double> contributions(cells, 0.0);
  std::vector<double> errors;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Vec c(d), sc(d);
  std::size_t budget_used = cells + ncorner;
  for (std::size_t k = 0; k < cells; ++k) {
    for (int a = 0; a < d; ++a) c(a) = S.lower(a) + (idx[a] + 0.5) * step(a);
    const Point centre = eval.at(c);
    const double base = centre.value * psi(c) * cell_vol;
    res.active_levels = std::max(res.active_levels, centre.levels);

    bool flagged = false;
    for (std::size_t corner = 0; corner < (std::size_t{1} << d) && !flagged; ++corner) {
      std::size_t lin = 0, stride = 1;
      for (int a = 0; a < d; ++a) {
        lin += (idx[a] + ((corner >> a) & 1)) * stride;
        stride *= static_cast<std::size_t>(n + 1);
      }
      if (corner_levels[lin] != centre.levels) flagged = true;
    }

    double value = base;
    if (flagged && m > 1) {
      budget_used += sub_per_cell;
      if (budget_used > q.budget) throw BudgetExceeded("quadrature refinement exceeds the budget", "resolution");
      ++res.refined_cells;
      const Vec sub = step / m;
      const Vec half = 0.5 * sub;
      std::vector<double> parts;
      parts.reserve(sub_per_cell);
      std::vector<int> sidx(static_cast<std::size_t>(d), 0);
      for (std::size_t t = 0; t < sub_per_cell; ++t) {
        for (int a = 0; a < d; ++a) sc(a) = S.lower(a) + idx[a] * step(a) + (sidx[a] + 0.5) * sub(a);
        const double wpsi = psi(sc);
        double dens = 0.0;
        if (wpsi != 0.0)
          dens = kind == DensityKind::MagneticFullRank ? eval.cell_average(sc, half) : eval.at(sc).value;
        parts.push_back(dens * wpsi * sub.prod());
        for (int a = 0; a < d && ++sidx[a] == m; ++a) sidx[a] = 0;
      }
      value = pairwise_sum(parts);
      errors.push_back(std::abs(value - base));
    }
    contributions[k] = value;
    for (int a = 0; a < d && ++idx[a] == n; ++a) idx[a] = 0;
  }
  res.value = pairwise_sum(contributions);
  res.quad_error_estimate = pairwise_sum(errors);
  return res;
}

}  // namespace

IntegralResult integrate_density(DensityKind kind, const Scenario& s, const CutoffFunction& psi,
                                 const WeylParams& p, const QuadratureSpec& q) {
  p.validate();
  psi.validate(s.domain);
  require(q.base_resolution >= 1, "base resolution must be positive", "resolution");
  require(q.refine_factor >= 1, "refine factor must be positive", "refine_factor");
  IntegralResult fine = integrate_once(kind, s, psi, p, q);
  if (q.base_resolution >= 2) {
    QuadratureSpec half = q;
    half.base_resolution = q.base_resolution / 2;
    const IntegralResult coarse = integrate_once(kind, s, psi, p, half);
    fine.quad_error_estimate = std::abs(fine.value - coarse.value);
  }
  return fine;
}

}  // namespace magweyl

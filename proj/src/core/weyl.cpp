#include "core/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace magweyl {

namespace {

constexpr double kTieTol = 1e-13;

struct LocalData {
  std::vector<double> f;
  double prod = 1.0;    // f_1 ... f_r
  double sqrt_g = 1.0;  // det(g_jk)^{1/2}
  int d = 0;
};

LocalData local_data(const Scenario& s, const Vec& x) {
  const FieldIntensity in = intensity_matrix(s, x);
  LocalData out;
  out.f = in.frequencies;
  out.prod = in.frequency_product();
  out.sqrt_g = 1.0 / std::sqrt(in.metric.determinant());
  out.d = in.dimension();
  return out;
}

// Energy slack below which a level is considered to sit at tau (theta(0) = 1).
double tie_slack(double tau, double v) {
  return kTieTol * std::max({1.0, std::abs(tau), std::abs(v)});
}

}  // namespace

void WeylParams::validate() const {
  require(std::isfinite(mu) && mu >= 1.0, "mu must be >= 1", "mu");
  require(std::isfinite(h) && h > 0.0 && h <= 1.0, "h must lie in (0, 1]", "h");
  require(std::isfinite(tau), "tau must be finite", "tau");
}

std::int64_t for_each_level(const std::vector<double>& f, double cap,
                            const std::function<void(const std::vector<int>&, double)>& visit,
                            std::size_t guard) {
  for (double v : f) require(std::isfinite(v) && v > 0.0, "frequencies must be positive", "frequencies");
  const int r = static_cast<int>(f.size());
  const double ground = std::accumulate(f.begin(), f.end(), 0.0);
  if (!(cap >= ground)) return 0;
  std::vector<int> alpha(static_cast<std::size_t>(r), 0);
  std::int64_t n = 0;
  // remaining = cap - E(alpha so far, with later entries at 0)
  auto rec = [&](auto&& self, int j, double energy) -> void {
    if (j == r) {
      if (static_cast<std::size_t>(++n) > guard)
        throw BudgetExceeded("Landau level enumeration exceeds the guard", "cap");
      if (visit) visit(alpha, energy);
      return;
    }
    for (int a = 0;; ++a) {
      const double e = energy + 2.0 * a * f[j];
      if (e > cap) break;
      alpha[j] = a;
      self(self, j + 1, e);
    }
    alpha[j] = 0;
  };
  rec(rec, 0, ground);
  return n;
}

std::int64_t count_levels(const std::vector<double>& f, double cap, std::size_t guard) {
  return for_each_level(f, cap, {}, guard);
}

std::vector<LandauLevel> landau_levels(const std::vector<double>& f, double cap, std::size_t guard) {
  std::vector<LandauLevel> out;
  for_each_level(
      f, cap, [&](const std::vector<int>& a, double e) { out.push_back({a, e}); }, guard);
  std::sort(out.begin(), out.end(), [](const LandauLevel& a, const LandauLevel& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.alpha < b.alpha;
  });
  return out;
}

double unit_ball_volume(int k) {
  return std::pow(M_PI, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

double magnetic_weyl_full_rank(const Scenario& s, const Vec& x, const WeylParams& p) {
  p.validate();
  const LocalData ld = local_data(s, x);
  const int r = static_cast<int>(ld.f.size());
  if (2 * r != ld.d) throw ComputationError("rank deficient intensity matrix", "scenario");
  const double V = s.scalar_potential(x);
  const double mh = p.mu * p.h;
  const double cap = (p.tau - V + tie_slack(p.tau, V)) / mh;
  const auto n = count_levels(ld.f, cap);
  return std::pow(2.0 * M_PI, -r) * std::pow(p.mu / p.h, r) * static_cast<double>(n) * ld.prod *
         ld.sqrt_g;
}

double standard_weyl(const Scenario& s, const Vec& x, const WeylParams& p) {
  p.validate();
  const int d = s.dimension;
  const double arg = p.tau - s.scalar_potential(x);
  if (arg <= 0.0) return 0.0;
  const Mat g = s.metric(x);
  return unit_ball_volume(d) * std::pow(2.0 * M_PI * p.h, -d) * std::pow(arg, 0.5 * d) /
         std::sqrt(g.determinant());
}

double magnetic_weyl_general(const Scenario& s, const Vec& x, const WeylParams& p) {
  p.validate();
  const LocalData ld = local_data(s, x);
  const int r = static_cast<int>(ld.f.size());
  const int d = ld.d;
  if (r == 0) return standard_weyl(s, x, p);
  if (2 * r == d) return magnetic_weyl_full_rank(s, x, p);
  const double V = s.scalar_potential(x);
  const double mh = p.mu * p.h;
  const double power = 0.5 * d - r;
  std::vector<double> terms;
  for_each_level(ld.f, (p.tau - V) / mh, [&](const std::vector<int>&, double e) {
    const double arg = p.tau - e * mh - V;
    if (arg > 0.0) terms.push_back(std::pow(arg, power));
  });
  const double sum = pairwise_sum(terms);
  return unit_ball_volume(d - 2 * r) * std::pow(2.0 * M_PI, r - d) * std::pow(p.mu, r) *
         std::pow(p.h, r - d) * sum * ld.prod * ld.sqrt_g;
}

CutoffFunction CutoffFunction::indicator(const Box& box) {
  CutoffFunction c;
  c.kind = Kind::Indicator;
  c.box = box;
  c.full_axis.assign(static_cast<std::size_t>(box.dimension()), false);
  return c;
}

CutoffFunction CutoffFunction::bump(const Vec& center, const Vec& half_width) {
  require(center.size() == half_width.size(), "bump centre and width dimension mismatch", "psi");
  for (Eigen::Index a = 0; a < half_width.size(); ++a)
    require(half_width(a) > 0.0, "bump half-width must be positive", "psi.half_width");
  CutoffFunction c;
  c.kind = Kind::Bump;
  c.box = Box{center - half_width, center + half_width};
  c.full_axis.assign(static_cast<std::size_t>(center.size()), false);
  return c;
}

CutoffFunction CutoffFunction::one(int dimension) {
  CutoffFunction c;
  c.kind = Kind::Indicator;
  c.box = Box{Vec::Zero(dimension), Vec::Ones(dimension)};
  c.full_axis.assign(static_cast<std::size_t>(dimension), true);
  return c;
}

double CutoffFunction::operator()(const Vec& x) const {
  const int d = box.dimension();
  if (kind == Kind::Indicator) {
    for (int a = 0; a < d; ++a)
      if (!full_axis[a] && (x(a) < box.lower(a) || x(a) > box.upper(a))) return 0.0;
    return 1.0;
  }
  double rho = 0.0;
  for (int a = 0; a < d; ++a) {
    if (full_axis[a]) continue;
    const double c = 0.5 * (box.lower(a) + box.upper(a));
    const double w = 0.5 * (box.upper(a) - box.lower(a));
    const double y = (x(a) - c) / w;
    rho += y * y;
  }
  if (rho >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - rho));
}

Box CutoffFunction::support(const Box& domain) const {
  Box out = box;
  for (int a = 0; a < box.dimension(); ++a)
    if (full_axis[a]) {
      out.lower(a) = domain.lower(a);
      out.upper(a) = domain.upper(a);
    }
  return out;
}

void CutoffFunction::validate(const Box& domain) const {
  require(box.dimension() == domain.dimension(), "cutoff dimension mismatch", "psi");
  require(static_cast<int>(full_axis.size()) == domain.dimension(), "cutoff axis flags mismatch", "psi");
  for (int a = 0; a < domain.dimension(); ++a) {
    if (full_axis[a]) continue;
    require(box.upper(a) > box.lower(a), "cutoff support must have positive extent", "psi");
    require(box.lower(a) >= domain.lower(a) && box.upper(a) <= domain.upper(a),
            "cutoff support must lie inside the domain", "psi");
  }
}

}  // namespace magweyl

#include "core/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/errors.hpp"
#include "core/weyl.hpp"

namespace magweyl {

namespace {

constexpr double kExactHit = 1e-12;

void require_positive(const std::vector<double>& f) {
  for (double v : f)
    require(std::isfinite(v) && v > 0.0, "frequencies must be positive", "frequencies");
}

double max_of(const std::vector<double>& f) {
  return f.empty() ? 0.0 : *std::max_element(f.begin(), f.end());
}

bool lex_positive(const std::vector<int>& g) {
  for (int v : g)
    if (v != 0) return v > 0;
  return false;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
  }
  Groups groups() {
    const int n = static_cast<int>(parent.size());
    Groups out;
    std::vector<int> slot(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      const int root = find(i);
      if (slot[root] < 0) {
        slot[root] = static_cast<int>(out.size());
        out.emplace_back();
      }
      out[slot[root]].push_back(i);
    }
    return out;
  }
};

std::vector<double> frequencies_at(const Scenario& s, const Vec& x) {
  const FieldIntensity in = intensity_matrix(s, x);
  if (!in.full_rank()) throw ComputationError("rank deficient intensity matrix", "scenario");
  return in.frequencies;
}

struct NearestLevel {
  double distance = std::numeric_limits<double>::infinity();
  std::vector<int> alpha;
};

// Distance from target to the nearest scaled level E_alpha * scale. Levels up
// to max(target, E_0) + 2 f_min cover the nearest one above target.
NearestLevel nearest_level(const std::vector<double>& f, double scale, double target) {
  const double ground = std::accumulate(f.begin(), f.end(), 0.0);
  const double fmin = *std::min_element(f.begin(), f.end());
  const double cap = std::max(target / scale, ground) + 2.0 * fmin;
  NearestLevel best;
  for_each_level(f, cap, [&](const std::vector<int>& alpha, double e) {
    const double dist = std::abs(e * scale - target);
    if (dist < best.distance) {
      best.distance = dist;
      best.alpha = alpha;
    }
  });
  return best;
}

void require_grid(const std::vector<Vec>& grid, int d) {
  require(!grid.empty(), "sample grid is empty", "grid");
  for (const Vec& x : grid) require(x.size() == d, "grid point dimension mismatch", "grid");
}

void finish(ConditionReport& rep, double value, double eps1) {
  const bool hit = value <= kExactHit;
  if (hit) value = 0.0;
  rep.margin = value - eps1;
  rep.satisfied = !hit && rep.margin >= 0.0;
}

}  // namespace

std::vector<ResonanceRelation> enumerate_resonances(const std::vector<double>& f, int max_order,
                                                    double tol) {
  require_positive(f);
  require(max_order <= kMaxResonanceOrder, "max_order exceeds the combinatorial guard (8)",
          "max_order");
  require(tol >= 0.0, "tolerance must be nonnegative", "tol");
  std::vector<ResonanceRelation> out;
  const int r = static_cast<int>(f.size());
  if (r == 0 || max_order < 2) return out;
  const double thresh = tol * max_of(f);
  std::vector<int> g(static_cast<std::size_t>(r), 0);

  auto visit = [&](auto&& self, int j, int budget) -> void {
    if (j == r) {
      const int order = max_order - budget;
      if (order < 2 || !lex_positive(g)) return;
      double sum = 0.0;
      for (int k = 0; k < r; ++k) sum += g[k] * f[k];
      if (std::abs(sum) <= thresh) out.push_back({g, order, std::abs(sum)});
      return;
    }
    for (int v = -budget; v <= budget; ++v) {
      g[j] = v;
      self(self, j + 1, budget - std::abs(v));
    }
    g[j] = 0;
  };
  visit(visit, 0, max_order);

  std::sort(out.begin(), out.end(), [](const ResonanceRelation& a, const ResonanceRelation& b) {
    if (a.order != b.order) return a.order < b.order;
    return a.gamma > b.gamma;
  });
  return out;
}

Groups partition_second_order(const std::vector<double>& f, double eps) {
  require_positive(f);
  require(eps >= 0.0, "eps must be nonnegative", "eps0");
  const int r = static_cast<int>(f.size());
  const double thresh = eps * max_of(f);
  UnionFind uf(r);
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      if (std::abs(f[i] - f[j]) <= thresh) uf.unite(i, j);
  return uf.groups();
}

Groups partition_third_order(const std::vector<double>& f, const Groups& groups_m, double eps) {
  require_positive(f);
  require(eps >= 0.0, "eps must be nonnegative", "eps0");
  const int r = static_cast<int>(f.size());
  require(is_partition(groups_m, r), "second-order groups are not a partition", "groups_M");
  const double thresh = eps * max_of(f);
  UnionFind uf(r);
  for (const auto& g : groups_m)
    for (int i : g) uf.unite(g.front(), i);
  // The triple relation does not depend on the current grouping, so a single
  // sweep reaches the fixpoint.
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = j; k < r; ++k)
        if (std::abs(f[i] - f[j] - f[k]) <= thresh) {
          uf.unite(i, j);
          uf.unite(i, k);
        }
  return uf.groups();
}

bool is_partition(const Groups& groups, int r) {
  std::vector<int> seen(static_cast<std::size_t>(std::max(r, 0)), 0);
  for (const auto& g : groups) {
    if (g.empty()) return false;
    for (int i : g) {
      if (i < 0 || i >= r || seen[i]++) return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

bool refines(const Groups& fine, const Groups& coarse) {
  int n = 0;
  for (const auto& g : coarse) n += static_cast<int>(g.size());
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t c = 0; c < coarse.size(); ++c)
    for (int i : coarse[c]) {
      if (i < 0 || i >= n) return false;
      owner[i] = static_cast<int>(c);
    }
  for (const auto& g : fine) {
    if (g.empty()) return false;
    for (int i : g)
      if (i < 0 || i >= n || owner[i] != owner[g.front()]) return false;
  }
  return true;
}

std::string condition_name(ConditionId id) {
  switch (id) {
    case ConditionId::MicrohypWeak: return "microhyp_const_weak";
    case ConditionId::MicrohypStrong: return "microhyp_const_strong";
    case ConditionId::MicrohypSuperstrong: return "microhyp_superstrong";
    case ConditionId::EllipticityGap: return "ellipticity_gap";
    case ConditionId::General: return "general_sampled";
  }
  return "unknown";
}

ConditionReport check_gap_condition(const Scenario& s, double mu, double h, double eps1,
                                    const std::vector<Vec>& grid, double tau) {
  require(mu > 0.0, "mu must be positive", "mu");
  require(h > 0.0, "h must be positive", "h");
  require(eps1 >= 0.0, "eps1 must be nonnegative", "eps1");
  require_grid(grid, s.dimension);
  ConditionReport rep;
  rep.id = ConditionId::EllipticityGap;
  double worst = std::numeric_limits<double>::infinity();
  for (const Vec& x : grid) {
    const auto f = frequencies_at(s, x);
    const NearestLevel nl = nearest_level(f, mu * h, tau - s.scalar_potential(x));
    if (nl.distance < worst) {
      worst = nl.distance;
      rep.witness = x;
      rep.witness_alpha = nl.alpha;
    }
  }
  finish(rep, worst, eps1);
  return rep;
}

ConditionReport check_microhyp_constant(const Scenario& s, const MicrohypParams& params,
                                        const std::vector<Vec>& grid) {
  require(params.eps1 >= 0.0, "eps1 must be nonnegative", "eps1");
  require_grid(grid, s.dimension);
  ConditionReport rep;
  double worst = std::numeric_limits<double>::infinity();
  switch (params.variant) {
    case MicrohypVariant::Weak: {
      rep.id = ConditionId::MicrohypWeak;
      for (const Vec& x : grid) {
        const double v = scalar_gradient(s, x).norm();
        if (v < worst) {
          worst = v;
          rep.witness = x;
        }
      }
      break;
    }
    case MicrohypVariant::Strong: {
      rep.id = ConditionId::MicrohypStrong;
      require(params.mu > 0.0 && params.h > 0.0, "strong variant needs mu and h", "mu");
      for (const Vec& x : grid) {
        const auto f = frequencies_at(s, x);
        const NearestLevel nl =
            nearest_level(f, params.mu * params.h, params.tau - s.scalar_potential(x));
        const double v = nl.distance + scalar_gradient(s, x).norm();
        if (v < worst) {
          worst = v;
          rep.witness = x;
          rep.witness_alpha = nl.alpha;
        }
      }
      break;
    }
    case MicrohypVariant::Superstrong: {
      rep.id = ConditionId::MicrohypSuperstrong;
      require(params.alpha_bar.has_value(), "superstrong variant needs alpha_bar", "alpha_bar");
      const auto& ab = *params.alpha_bar;
      for (int a : ab) require(a >= 0, "alpha_bar entries must be nonnegative", "alpha_bar");
      auto ratio = [&](const Vec& y) {
        const auto f = intensity_matrix(s, y).frequencies;
        require(f.size() == ab.size(), "alpha_bar length must equal r", "alpha_bar");
        double e = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) e += (2.0 * ab[j] + 1.0) * f[j];
        return s.scalar_potential(y) / e;
      };
      const double delta = 1e-5 * s.domain.diameter();
      for (const Vec& x : grid) {
        frequencies_at(s, x);
        Vec grad(s.dimension);
        for (int a = 0; a < s.dimension; ++a) {
          Vec xp = x, xm = x;
          xp(a) += delta;
          xm(a) -= delta;
          grad(a) = (ratio(xp) - ratio(xm)) / (2.0 * delta);
        }
        const double v = grad.norm();
        if (v < worst) {
          worst = v;
          rep.witness = x;
          rep.witness_alpha = ab;
        }
      }
      break;
    }
  }
  finish(rep, worst, params.eps1);
  return rep;
}

namespace {

// Points on the unit simplex in R^m: vertices, centroid, edge midpoints, then a
// deterministic low-discrepancy fill up to `count`.
std::vector<std::vector<double>> simplex_samples(int m, int count) {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < m; ++i) {
    std::vector<double> p(static_cast<std::size_t>(m), 0.0);
    p[i] = 1.0;
    pts.push_back(p);
  }
  if (m == 1) return pts;
  pts.emplace_back(static_cast<std::size_t>(m), 1.0 / m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      std::vector<double> p(static_cast<std::size_t>(m), 0.0);
      p[i] = p[j] = 0.5;
      pts.push_back(p);
    }
  // Golden-ratio sequence mapped through sorted-uniform spacings.
  double u = 0.5;
  constexpr double kPhi = 0.6180339887498949;
  while (static_cast<int>(pts.size()) < count) {
    std::vector<double> cuts;
    for (int k = 0; k < m - 1; ++k) {
      u = std::fmod(u + kPhi * (k + 1.3), 1.0);
      cuts.push_back(u);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> p;
    double prev = 0.0;
    for (double c : cuts) {
      p.push_back(c - prev);
      prev = c;
    }
    p.push_back(1.0 - prev);
    pts.push_back(std::move(p));
  }
  return pts;
}

std::vector<Vec> direction_samples(int d, int per_plane) {
  std::vector<Vec> dirs;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      for (int k = 0; k < per_plane; ++k) {
        const double t = 2.0 * M_PI * k / per_plane;
        Vec l = Vec::Zero(d);
        l(a) = std::cos(t);
        l(b) = std::sin(t);
        dirs.push_back(std::move(l));
      }
  return dirs;
}

}  // namespace

ConditionReport check_microhyp_general(const Scenario& s, const GeneralCheckParams& params,
                                       const std::vector<Vec>& grid) {
  require(params.direction_samples > 0, "direction_samples must be positive", "direction_samples");
  require(params.level_samples > 0, "level_samples must be positive", "level_samples");
  require(params.zeta_samples > 0, "zeta_samples must be positive", "zeta_samples");
  require(params.eps0 >= 0.0 && params.eps >= 0.0 && params.eps1 >= 0.0,
          "tolerances must be nonnegative", "eps");
  require_grid(grid, s.dimension);
  const int d = s.dimension;
  const double delta = 1e-5 * s.domain.diameter();
  const std::vector<Vec> plane_dirs = direction_samples(d, params.direction_samples);

  ConditionReport rep;
  rep.id = ConditionId::General;
  double worst = std::numeric_limits<double>::infinity();

  for (const Vec& x : grid) {
    const auto f = frequencies_at(s, x);
    const int r = static_cast<int>(f.size());
    const double V = s.scalar_potential(x);
    if (std::abs(V) <= kExactHit) throw ComputationError("potential vanishes at a sample point", "scenario");

    // G_j = grad(f_j / V)
    std::vector<Vec> G(static_cast<std::size_t>(r), Vec::Zero(d));
    for (int a = 0; a < d; ++a) {
      Vec xp = x, xm = x;
      xp(a) += delta;
      xm(a) -= delta;
      const auto fp = intensity_matrix(s, xp).frequencies;
      const auto fm = intensity_matrix(s, xm).frequencies;
      const double Vp = s.scalar_potential(xp), Vm = s.scalar_potential(xm);
      for (int j = 0; j < r; ++j) G[j](a) = (fp[j] / Vp - fm[j] / Vm) / (2.0 * delta);
    }

    const Groups groups =
        partition_third_order(f, partition_second_order(f, params.eps0), params.eps0);
    const int ng = static_cast<int>(groups.size());

    std::vector<Vec> dirs = plane_dirs;
    Vec guess = Vec::Zero(d);
    for (int j = 0; j < r; ++j) guess -= G[j] / f[j];
    if (guess.norm() > 0.0) dirs.push_back(guess.normalized());

    // c[l][n] = min over the group's zeta torus of sum_j (l . G_j) w_j per unit tau_n,
    // with w_j = lambda_j / f_j on the simplex.
    std::vector<std::vector<double>> c(dirs.size(), std::vector<double>(static_cast<std::size_t>(ng)));
    for (int n = 0; n < ng; ++n) {
      const auto& grp = groups[n];
      const auto lam = simplex_samples(static_cast<int>(grp.size()), params.zeta_samples);
      for (std::size_t l = 0; l < dirs.size(); ++l) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& p : lam) {
          double q = 0.0;
          for (std::size_t k = 0; k < grp.size(); ++k) q += dirs[l].dot(G[grp[k]]) * p[k] / f[grp[k]];
          m = std::min(m, q);
        }
        c[l][n] = m;
      }
    }

    const auto splits = simplex_samples(ng, ng == 1 ? 1 : ng + 1 + ng * (ng - 1) / 2);
    for (int k = 0; k < params.level_samples; ++k) {
      const double shift =
          params.level_samples == 1 ? 0.0 : params.eps * (2.0 * k / (params.level_samples - 1) - 1.0);
      const double total = -V + shift;
      if (total <= 0.0) continue;  // no admissible zeta: energy shell empty
      for (const auto& split : splits) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < dirs.size(); ++l) {
          double q = 0.0;
          for (int n = 0; n < ng; ++n) q += total * split[n] * c[l][n];
          best = std::max(best, q);
        }
        if (best < worst) {
          worst = best;
          rep.witness = x;
        }
      }
    }
  }
  if (!std::isfinite(worst)) {
    rep.note = "no admissible level samples";
    worst = std::numeric_limits<double>::infinity();
    rep.satisfied = true;
    rep.margin = worst;
    return rep;
  }
  rep.note = "sampled certificate: " + std::to_string(plane_dirs.size()) + " directions, " +
             std::to_string(params.level_samples) + " level samples, " +
             std::to_string(params.zeta_samples) + " zeta samples";
  finish(rep, worst, params.eps1);
  return rep;
}

}  // namespace magweyl

#include "core/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <tuple>

#include "core/errors.hpp"

namespace magweyl {

namespace {

constexpr std::size_t kLatticeBudget = 4'000'000;

bool any_full_rank(const Scenario& s) {
  const Vec centre = 0.5 * (s.domain.lower + s.domain.upper);
  return intensity_matrix(s, centre).rank == s.dimension;
}

}  // namespace

Regime parse_regime(const std::string& name) {
  if (name == "weak") return Regime::Weak;
  if (name == "intermediate") return Regime::Intermediate;
  if (name == "strong") return Regime::Strong;
  if (name == "superstrong") return Regime::Superstrong;
  throw InvalidArgument("unknown regime '" + name + "'", "sweep.regime");
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Weak: return "weak";
    case Regime::Intermediate: return "intermediate";
    case Regime::Strong: return "strong";
    case Regime::Superstrong: return "superstrong";
  }
  return "intermediate";
}

double default_kappa(Regime r) {
  switch (r) {
    case Regime::Weak: return 0.4;
    case Regime::Intermediate: return 0.5;
    case Regime::Strong: return 0.75;
    case Regime::Superstrong: return 1.0;
  }
  return 0.5;
}

CutoffFunction CutoffSpec::resolve(const Box& domain, const std::vector<Boundary>& boundary) const {
  const int d = domain.dimension();
  std::vector<bool> full(static_cast<std::size_t>(d), false);
  for (int a : full_axes) {
    require(a >= 1 && a <= d, "full axis index out of range", "sweep.psi.full_axes");
    full[a - 1] = true;
  }
  auto vec_or = [&](const std::vector<double>& v, const char* field, auto fallback) {
    if (v.empty()) {
      Vec out(d);
      for (int a = 0; a < d; ++a) out(a) = fallback(a);
      return out;
    }
    require(static_cast<int>(v.size()) == d, "cutoff vector has the wrong length", field);
    return Vec(Vec::Map(v.data(), d));
  };
  CutoffFunction psi;
  if (kind == "one") {
    psi = CutoffFunction::one(d);
    psi.box = domain;
    return psi;
  }
  const bool defaults = center.empty() && half_width.empty() && lower.empty() && upper.empty();
  if (defaults && full_axes.empty())
    for (int a = 0; a < d; ++a) full[a] = boundary.size() == static_cast<std::size_t>(d) && boundary[a] == Boundary::Periodic;
  const Vec mid = 0.5 * (domain.lower + domain.upper);
  const Vec ext = domain.extent();
  if (kind == "bump") {
    const Vec c = vec_or(center, "sweep.psi.center", [&](int a) { return mid(a); });
    const Vec w = vec_or(half_width, "sweep.psi.half_width", [&](int a) { return 0.2 * ext(a); });
    psi = CutoffFunction::bump(c, w);
  } else if (kind == "indicator") {
    const Vec lo = vec_or(lower, "sweep.psi.lower", [&](int a) { return mid(a) - 0.2 * ext(a); });
    const Vec hi = vec_or(upper, "sweep.psi.upper", [&](int a) { return mid(a) + 0.2 * ext(a); });
    psi = CutoffFunction::indicator(Box{lo, hi});
  } else {
    throw InvalidArgument("unknown cutoff kind '" + kind + "'", "sweep.psi.kind");
  }
  psi.full_axis = full;
  for (int a = 0; a < d; ++a)
    if (full[a]) {
      psi.box.lower(a) = domain.lower(a);
      psi.box.upper(a) = domain.upper(a);
    }
  psi.validate(domain);
  return psi;
}

void SweepSpec::validate() const {
  require(!h_list.empty(), "h_list must not be empty", "sweep.h_list");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    const std::string field = "sweep.h_list[" + std::to_string(i) + "]";
    require(std::isfinite(h_list[i]) && h_list[i] > 0.0 && h_list[i] <= 1.0, "h must lie in (0, 1]", field);
    if (i > 0) require(h_list[i] < h_list[i - 1], "h_list must be strictly decreasing", field);
  }
  require(std::isfinite(c) && c > 0.0, "c must be positive", "sweep.c");
  const double k = effective_kappa();
  require(std::isfinite(k) && k >= 0.0 && k <= 1.0, "kappa must lie in [0, 1]", "sweep.kappa");
  for (std::size_t i = 0; i < h_list.size(); ++i)
    require(c * std::pow(h_list[i], -k) >= 1.0, "mu = c h^-kappa must be >= 1",
            "sweep.h_list[" + std::to_string(i) + "]");
  require(std::isfinite(points_per_wavelength) && points_per_wavelength > 0.0,
          "points_per_wavelength must be positive", "sweep.points_per_wavelength");
  require(std::isfinite(tau), "tau must be finite", "sweep.tau");
  require(eps1 >= 0.0, "eps1 must be nonnegative", "sweep.eps1");
  require(quad_resolution >= 0, "quad_resolution must be nonnegative", "sweep.quad_resolution");
  bool known = false;
  for (const auto& info : scenario_catalog()) known |= info.name == scenario;
  require(known, "unknown scenario '" + scenario + "'", "sweep.scenario");
}

std::vector<Boundary> default_boundaries(const std::string& scenario, int dimension) {
  std::vector<Boundary> bc(static_cast<std::size_t>(dimension), Boundary::Dirichlet);
  if (scenario == "const2d" || scenario == "resonant4d") std::fill(bc.begin(), bc.end(), Boundary::Periodic);
  if (scenario == "varV2d") bc[0] = Boundary::Periodic;
  return bc;
}

Lattice sweep_lattice(const Scenario& s, double h, double ppw, const std::vector<Boundary>& bc) {
  require(static_cast<int>(bc.size()) == s.dimension, "boundary list has the wrong length", "sweep.boundary");
  Lattice lat;
  lat.domain = s.domain;
  lat.boundary = bc;
  for (int a = 0; a < s.dimension; ++a) {
    const double raw = ppw * s.domain.extent()(a) / h;
    lat.n.push_back(std::max(4, static_cast<int>(std::ceil(raw - 1e-9 * raw))));
  }
  if (lat.size() > kLatticeBudget)
    throw BudgetExceeded("lattice size " + std::to_string(lat.size()) + " exceeds the budget", "sweep.h_list");
  return lat;
}

double mu1_star(double h) { return std::pow(h, -0.5) * std::pow(std::abs(std::log(h)), -0.5); }
double mu2_star(double h) { return 1.0 / (h * std::abs(std::log(h))); }

RemainderRecord run_sweep_point(const SweepSpec& spec, double h) {
  RemainderRecord rec;
  rec.h = h;
  rec.mu = spec.c * std::pow(h, -spec.effective_kappa());
  rec.mu1_star = mu1_star(h);
  rec.mu2_star = mu2_star(h);
  const Scenario s = make_scenario(spec.scenario, spec.overrides, rec.mu, h);
  const auto bc = spec.boundary.empty() ? default_boundaries(spec.scenario, s.dimension) : spec.boundary;
  const Lattice lat = sweep_lattice(s, h, spec.points_per_wavelength, bc);
  rec.n = *std::max_element(lat.n.begin(), lat.n.end());
  rec.N = lat.size();
  CutoffFunction psi = spec.psi.resolve(s.domain, bc);

  const DiscreteHamiltonian H = assemble(s, rec.mu, h, lat);
  for (const auto& w : H.warnings) rec.note += (rec.note.empty() ? "" : "; ") + w;

  if (bloch_symmetry(H)) {
    rec.numeric = local_trace(H, spec.tau, psi, EigenMethod::Bloch, spec.dense_budget);
    rec.method = "local_trace_bloch";
  } else if (H.size() <= spec.dense_budget) {
    rec.numeric = local_trace(H, spec.tau, psi, EigenMethod::Dense, spec.dense_budget);
    rec.method = "local_trace_dense";
  } else {
    // Indicator of the cutoff support, counted on the Dirichlet-truncated sub-box.
    const Box sub = psi.support(s.domain);
    Scenario ss = s;
    ss.domain = sub;
    std::vector<Boundary> sbc = bc;
    for (int a = 0; a < s.dimension; ++a)
      if (!psi.full_axis[a]) sbc[a] = Boundary::Dirichlet;
    const Lattice slat = sweep_lattice(ss, h, spec.points_per_wavelength, sbc);
    const DiscreteHamiltonian Hs = assemble(ss, rec.mu, h, slat);
    rec.numeric = static_cast<double>(count_below(Hs, spec.tau, CountMethod::Inertia).count);
    psi = CutoffFunction::indicator(sub);
    psi.full_axis.assign(static_cast<std::size_t>(s.dimension), false);
    rec.method = "subbox_count";
    rec.note += std::string(rec.note.empty() ? "" : "; ") +
                "psi replaced by the support indicator; Dirichlet boundary layer of width O(sqrt(h/mu)) included in R";
  }

  WeylParams wp{rec.mu, h, spec.tau};
  QuadratureSpec q;
  q.base_resolution = spec.quad_resolution > 0 ? spec.quad_resolution : std::max(128, rec.n);
  const DensityKind kind = any_full_rank(s) ? DensityKind::MagneticFullRank : DensityKind::MagneticGeneral;
  const IntegralResult ir = integrate_density(kind, s, psi, wp, q);
  rec.principal = ir.value;
  rec.quad_error = ir.quad_error_estimate;
  rec.R = std::abs(rec.numeric - rec.principal);
  rec.relative = rec.principal > 0.0 ? rec.R / rec.principal : 0.0;
  rec.quad_flag = rec.quad_error > 0.1 * rec.R;

  const auto grid = sample_grid(psi.support(s.domain), 16);
  ConditionReport cr;
  if (spec.gap_regime) {
    cr = check_gap_condition(s, rec.mu, h, spec.eps1, grid, spec.tau);
  } else {
    MicrohypParams mp;
    mp.variant = MicrohypVariant::Weak;
    mp.eps1 = spec.eps1;
    cr = check_microhyp_constant(s, mp, grid);
  }
  rec.condition_met = cr.satisfied;
  rec.condition_margin = cr.margin;
  if (!cr.satisfied) rec.note += std::string(rec.note.empty() ? "" : "; ") + "condition unmet";
  return rec;
}

std::vector<RemainderRecord> run_remainder_sweep(const SweepSpec& spec, int workers,
                                                 std::vector<double>* wall_seconds) {
  spec.validate();
  require(workers >= 1, "workers must be positive", "workers");
  std::vector<double> hs = spec.h_list;
  std::sort(hs.begin(), hs.end(), std::greater<>());
  std::vector<RemainderRecord> out(hs.size());
  std::vector<double> wall(hs.size(), 0.0);
  for (std::size_t start = 0; start < hs.size(); start += static_cast<std::size_t>(workers)) {
    std::vector<std::future<std::pair<RemainderRecord, double>>> batch;
    const std::size_t stop = std::min(hs.size(), start + static_cast<std::size_t>(workers));
    for (std::size_t i = start; i < stop; ++i)
      batch.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async,
                                 [&spec, h = hs[i]] {
                                   const auto t0 = std::chrono::steady_clock::now();
                                   RemainderRecord r = run_sweep_point(spec, h);
                                   const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
                                   return std::make_pair(std::move(r), dt.count());
                                 }));
    for (std::size_t i = start; i < stop; ++i) std::tie(out[i], wall[i]) = batch[i - start].get();
  }
  if (wall_seconds) *wall_seconds = std::move(wall);
  return out;
}

FitResult fit_scaling(const std::vector<RemainderRecord>& records, std::optional<double> predicted) {
  std::vector<double> xs, ys;
  FitResult fit;
  fit.predicted_exponent = predicted;
  for (const auto& r : records) {
    if (r.flagged()) continue;
    if (r.R == 0.0) {
      ++fit.skipped_zero;
      continue;
    }
    require(r.h > 0.0 && std::isfinite(r.R) && r.R > 0.0, "records must have positive h and R", "records");
    xs.push_back(std::log(1.0 / r.h));
    ys.push_back(std::log(r.R));
  }
  fit.points = static_cast<int>(xs.size());
  require(fit.points >= 3, "fit needs at least 3 unflagged nonzero records", "records");
  const double n = fit.points;
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < fit.points; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  require(sxx > 0.0, "fit needs distinct h values", "records");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (int i = 0; i < fit.points; ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

double predicted_exponent(int dimension, double kappa) { return (dimension - 1) - kappa; }

DegeneracyReport degeneracy_test(const Scenario& s, double mu, double h, const Lattice& lattice, int clusters) {
  require(clusters >= 1, "clusters must be positive", "clusters");
  for (Boundary b : lattice.boundary)
    require(b == Boundary::Periodic, "degeneracy test needs periodic boundary conditions", "bc");
  const Vec centre = 0.5 * (s.domain.lower + s.domain.upper);
  const FieldIntensity in = intensity_matrix(s, centre);
  if (in.rank != s.dimension) throw ComputationError("rank deficient intensity matrix", "scenario");
  const int r = static_cast<int>(in.frequencies.size());
  DegeneracyReport rep;
  rep.predicted = std::pow(2.0 * M_PI, -r) * std::pow(mu / h, r) * liouville_density(in) * s.domain.volume();

  // Distinct predicted energies (in units of mu h) until enough are known.
  std::vector<double> distinct;
  std::vector<int> count;
  double cap = 0.0;
  for (double f : in.frequencies) cap += f;
  while (static_cast<int>(distinct.size()) <= clusters) {
    distinct.clear();
    count.clear();
    for (const auto& lv : landau_levels(in.frequencies, cap)) {
      if (distinct.empty() || lv.energy - distinct.back() > 1e-9 * lv.energy) {
        distinct.push_back(lv.energy);
        count.push_back(0);
      }
      ++count.back();
    }
    cap += 2.0 * in.frequencies.back();
  }
  for (int i = 0; i < clusters; ++i)
    rep.expected.push_back(static_cast<int>(std::lround(rep.predicted * count[i])));
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < clusters; ++i) gap = std::min(gap, (distinct[i + 1] - distinct[i]) * mu * h);
  const double V = s.scalar_potential(centre);
  const double upper = distinct[clusters - 1] * mu * h + V + 0.5 * gap;

  const DiscreteHamiltonian H = assemble(s, mu, h, lattice);
  const auto w = eigenvalues(H, EigenMethod::Auto, upper);
  if (w.empty()) throw ComputationError("no eigenvalues below the cluster window", "n");
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= w.size(); ++i) {
    if (i == w.size() || w[i] - w[i - 1] > 0.5 * gap) {
      rep.measured.push_back(static_cast<int>(i - begin));
      rep.cluster_centers.push_back(0.5 * (w[begin] + w[i - 1]));
      rep.cluster_widths.push_back(w[i - 1] - w[begin]);
      begin = i;
    }
  }
  if (static_cast<int>(rep.measured.size()) != clusters)
    throw ComputationError("clusters unresolved: found " + std::to_string(rep.measured.size()) + " of " +
                               std::to_string(clusters),
                           "n");
  const double P = std::round(rep.predicted);
  rep.exact = std::abs(rep.predicted - P) < 1e-6 * std::max(1.0, P);
  return rep;
}

}  // namespace magweyl

#include "core/commands.hpp"

#include <chrono>
#include <cmath>

#include "core/errors.hpp"

namespace magweyl {

namespace {

struct ScenarioChoice {
  std::string name;
  ParameterMap overrides;
};

ScenarioChoice read_scenario(ObjectReader& in) {
  ScenarioChoice c;
  const Json& j = in.raw("scenario");
  if (j.is_string()) {
    c.name = j.get<std::string>();
    return c;
  }
  ObjectReader s(j, "scenario");
  c.name = s.string("name", "");
  if (c.name.empty()) throw InvalidArgument("missing scenario name", "scenario.name");
  s.touch("overrides");
  if (s.has("overrides")) c.overrides = parameters_from_json(s.raw("overrides"), "scenario.overrides");
  s.finish();
  return c;
}

std::optional<double> optional_number(ObjectReader& in, const std::string& key) {
  in.touch(key);
  if (!in.has(key)) return std::nullopt;
  return in.number(key);
}

double positive(ObjectReader& in, const std::string& key, std::optional<double> fallback = std::nullopt) {
  in.touch(key);
  if (!in.has(key)) {
    if (!fallback) throw InvalidArgument("missing required key", in.field(key));
    return *fallback;
  }
  const double v = in.number(key);
  if (!(v > 0.0)) throw InvalidArgument("must be positive", in.field(key));
  return v;
}

Vec read_point(ObjectReader& in, const std::string& key, const Scenario& s) {
  const auto xs = in.numbers(key);
  if (static_cast<int>(xs.size()) != s.dimension)
    throw InvalidArgument("point needs " + std::to_string(s.dimension) + " coordinates", in.field(key));
  Vec x = Vec::Map(xs.data(), s.dimension);
  if (!s.domain.contains(x, 1e-12)) throw InvalidArgument("point lies outside the domain", in.field(key));
  return x;
}

std::vector<Boundary> read_boundaries(ObjectReader& in, const std::string& key, const std::string& scenario,
                                      int d) {
  in.touch(key);
  if (!in.has(key)) return default_boundaries(scenario, d);
  const Json& j = in.raw(key);
  try {
    if (j.is_string()) return std::vector<Boundary>(static_cast<std::size_t>(d), parse_boundary(j.get<std::string>()));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(e.what(), in.field(key));
  }
  std::vector<Boundary> out;
  const auto names = in.strings(key);
  if (static_cast<int>(names.size()) != d)
    throw InvalidArgument("boundary list needs " + std::to_string(d) + " entries", in.field(key));
  for (std::size_t i = 0; i < names.size(); ++i) {
    try {
      out.push_back(parse_boundary(names[i]));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(e.what(), in.field(key) + "[" + std::to_string(i) + "]");
    }
  }
  return out;
}

Lattice read_lattice(ObjectReader& in, const Scenario& s, const std::string& scenario) {
  Lattice lat;
  lat.domain = s.domain;
  const int d = s.dimension;
  if (!in.has("n")) throw InvalidArgument("missing required key", in.field("n"));
  const Json& j = in.raw("n");
  if (j.is_number()) {
    lat.n.assign(static_cast<std::size_t>(d), in.integer("n", 0));
  } else {
    lat.n = in.integers("n");
    if (static_cast<int>(lat.n.size()) != d)
      throw InvalidArgument("n needs " + std::to_string(d) + " entries", in.field("n"));
  }
  lat.boundary = read_boundaries(in, "bc", scenario, d);
  for (int v : lat.n)
    if (v < 4) throw InvalidArgument("at least 4 points per axis are required", in.field("n"));
  return lat;
}

Json scenario_json(const Scenario& s) {
  return Json{{"name", s.name}, {"dimension", s.dimension}, {"lower", to_json(s.domain.lower)},
              {"upper", to_json(s.domain.upper)}};
}

}  // namespace

Json run_analyze(const Json& options) {
  ObjectReader in(options, "analyze");
  const ScenarioChoice sc = read_scenario(in);
  const auto mu = optional_number(in, "mu");
  const auto h = optional_number(in, "h");
  if (mu && !(*mu > 0.0)) throw InvalidArgument("must be positive", "analyze.mu");
  if (h && !(*h > 0.0 && *h <= 1.0)) throw InvalidArgument("must lie in (0, 1]", "analyze.h");
  const Scenario s = make_scenario(sc.name, sc.overrides, mu, h);
  const double eps0 = in.number("eps0", 0.05);
  const double eps1 = in.number("eps1", 0.0);
  const double tol = in.number("tol", 1e-9);
  const double tau = in.number("tau", 0.0);
  const int max_order = in.integer("max_order", 3);
  const int grid_n = in.integer("grid", s.dimension <= 2 ? 8 : 3);
  if (eps0 < 0.0) throw InvalidArgument("must be nonnegative", "analyze.eps0");
  if (eps1 < 0.0) throw InvalidArgument("must be nonnegative", "analyze.eps1");
  if (tol < 0.0) throw InvalidArgument("must be nonnegative", "analyze.tol");
  if (max_order < 2 || max_order > kMaxResonanceOrder)
    throw InvalidArgument("max_order must lie in [2, " + std::to_string(kMaxResonanceOrder) + "]",
                          "analyze.max_order");
  if (grid_n < 1) throw InvalidArgument("must be positive", "analyze.grid");
  GeneralCheckParams gp;
  gp.eps0 = eps0;
  gp.eps1 = eps1;
  gp.eps = in.number("window", gp.eps);
  gp.direction_samples = in.integer("directions", gp.direction_samples);
  gp.level_samples = in.integer("level_samples", gp.level_samples);
  gp.zeta_samples = in.integer("zeta_samples", gp.zeta_samples);
  const auto alpha_bar = in.integers("alpha_bar");
  const Vec x = in.has("point") ? read_point(in, "point", s) : Vec(0.5 * (s.domain.lower + s.domain.upper));
  in.touch("point");
  in.finish();

  const FieldIntensity fi = intensity_matrix(s, x);
  Json out{{"scenario", scenario_json(s)},
           {"point", to_json(x)},
           {"F", to_json(fi.F)},
           {"frequencies", fi.frequencies},
           {"rank", fi.rank},
           {"full_rank", fi.full_rank()},
           {"inv_norm", fi.inv_norm ? Json(*fi.inv_norm) : Json("singular")},
           {"eps0", eps0},
           {"eps1", eps1}};
  if (fi.full_rank()) out["liouville"] = liouville_density(fi);
  Json rel = Json::array();
  if (!fi.frequencies.empty())
    for (const auto& r : enumerate_resonances(fi.frequencies, max_order, tol)) rel.push_back(to_json(r));
  out["relations"] = rel;
  const Groups gm = partition_second_order(fi.frequencies, eps0);
  const Groups gn = partition_third_order(fi.frequencies, gm, eps0);
  out["groups_M"] = groups_to_json(gm);
  out["groups_N"] = groups_to_json(gn);

  const auto grid = sample_grid(s.domain, grid_n);
  Json conds = Json::array();
  MicrohypParams mp;
  mp.eps1 = eps1;
  mp.tau = tau;
  conds.push_back(to_json(check_microhyp_constant(s, mp, grid)));
  if (mu && h) {
    mp.variant = MicrohypVariant::Strong;
    mp.mu = *mu;
    mp.h = *h;
    conds.push_back(to_json(check_microhyp_constant(s, mp, grid)));
    if (fi.full_rank()) conds.push_back(to_json(check_gap_condition(s, *mu, *h, eps1, grid, tau)));
  }
  if (!alpha_bar.empty()) {
    if (static_cast<int>(alpha_bar.size()) != static_cast<int>(fi.frequencies.size()))
      throw InvalidArgument("alpha_bar needs one entry per frequency", "analyze.alpha_bar");
    mp.variant = MicrohypVariant::Superstrong;
    mp.alpha_bar = alpha_bar;
    conds.push_back(to_json(check_microhyp_constant(s, mp, grid)));
  }
  if (fi.full_rank()) conds.push_back(to_json(check_microhyp_general(s, gp, grid)));
  out["conditions"] = conds;
  return out;
}

Json run_weyl(const Json& options) {
  ObjectReader in(options, "weyl");
  const ScenarioChoice sc = read_scenario(in);
  WeylParams p;
  p.mu = positive(in, "mu");
  p.h = positive(in, "h");
  p.tau = in.number("tau", 0.0);
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(e.what(), std::string("weyl.") + (p.mu < 1.0 ? "mu" : "h"));
  }
  const Scenario s = make_scenario(sc.name, sc.overrides, p.mu, p.h);
  const Vec centre = 0.5 * (s.domain.lower + s.domain.upper);
  const std::string density = in.string("density", "auto");
  DensityKind kind;
  if (density == "auto")
    kind = intensity_matrix(s, centre).rank == s.dimension ? DensityKind::MagneticFullRank : DensityKind::MagneticGeneral;
  else if (density == "full_rank") kind = DensityKind::MagneticFullRank;
  else if (density == "general") kind = DensityKind::MagneticGeneral;
  else if (density == "standard") kind = DensityKind::Standard;
  else throw InvalidArgument("density must be auto, full_rank, general or standard", "weyl.density");
  const std::string kind_name = kind == DensityKind::MagneticFullRank ? "full_rank"
                                : kind == DensityKind::MagneticGeneral ? "general"
                                                                       : "standard";

  Json out{{"scenario", scenario_json(s)}, {"mu", p.mu}, {"h", p.h}, {"tau", p.tau}, {"density", kind_name}};
  in.touch("point");
  if (in.has("point")) {
    const Vec x = read_point(in, "point", s);
    in.touch("psi");
    in.touch("resolution");
    if (in.has("psi") || in.has("resolution"))
      throw InvalidArgument("point evaluation takes no cutoff or resolution", "weyl.point");
    in.finish();
    double v = 0.0;
    if (kind == DensityKind::MagneticFullRank) v = magnetic_weyl_full_rank(s, x, p);
    else if (kind == DensityKind::MagneticGeneral) v = magnetic_weyl_general(s, x, p);
    else v = standard_weyl(s, x, p);
    const FieldIntensity fi = intensity_matrix(s, x);
    const double room = (p.tau - s.scalar_potential(x)) / (p.mu * p.h);
    out["point"] = to_json(x);
    out["value"] = v;
    out["quad_error_estimate"] = 0.0;
    out["active_levels"] = fi.frequencies.empty() ? 0 : count_levels(fi.frequencies, room);
    return out;
  }
  in.touch("psi");
  CutoffSpec cs;
  cs.kind = "one";
  if (in.has("psi")) cs = cutoff_spec_from_json(in.raw("psi"), "weyl.psi");
  QuadratureSpec q;
  q.base_resolution = in.integer("resolution", q.base_resolution);
  if (q.base_resolution < 2) throw InvalidArgument("resolution must be at least 2", "weyl.resolution");
  in.finish();
  const CutoffFunction psi = cs.resolve(s.domain, default_boundaries(s.name, s.dimension));
  const IntegralResult r = integrate_density(kind, s, psi, p, q);
  out.update(to_json(r));
  out["psi"] = cs.kind;
  return out;
}

Json run_count(const Json& options) {
  ObjectReader in(options, "count");
  const ScenarioChoice sc = read_scenario(in);
  const double mu = in.number("mu");
  if (mu < 0.0) throw InvalidArgument("must be nonnegative", "count.mu");
  const double h = positive(in, "h");
  const double tau = in.number("tau", 0.0);
  const std::string method_name = in.string("method", "auto");
  CountMethod method;
  try {
    method = parse_count_method(method_name);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(e.what(), "count.method");
  }
  const int budget = in.integer("dense_budget", static_cast<int>(kDenseBudget));
  if (budget < 1) throw InvalidArgument("must be positive", "count.dense_budget");
  const Scenario s = make_scenario(sc.name, sc.overrides, mu > 0.0 ? std::optional<double>(mu) : std::nullopt, h);
  const Lattice lat = read_lattice(in, s, sc.name);
  in.finish();
  const DiscreteHamiltonian H = assemble(s, mu, h, lat);
  const CountResult r = count_below(H, tau, method, static_cast<std::size_t>(budget));
  Json out = to_json(r);
  out["N"] = H.size();
  out["n"] = lat.n;
  Json bc = Json::array();
  for (Boundary b : lat.boundary) bc.push_back(boundary_name(b));
  out["bc"] = bc;
  out["tau"] = tau;
  out["warnings"] = H.warnings;
  out["scenario"] = scenario_json(s);
  return out;
}

Json run_reduce(const Json& options) {
  ObjectReader in(options, "reduce");
  const ScenarioChoice sc = read_scenario(in);
  const double mu = positive(in, "mu");
  const auto h = optional_number(in, "h");
  if (h && !(*h > 0.0 && *h <= 1.0)) throw InvalidArgument("must lie in (0, 1]", "reduce.h");
  const Scenario s = make_scenario(sc.name, sc.overrides, mu, h);
  const int levels = in.integer("levels", 3);
  std::optional<Lattice> lat;
  in.touch("n");
  if (in.has("n")) {
    if (!h) throw InvalidArgument("spectral verification needs h", "reduce.h");
    if (levels < 1) throw InvalidArgument("must be positive", "reduce.levels");
    lat = read_lattice(in, s, sc.name);
  } else {
    in.touch("bc");
  }
  in.finish();
  const Reduction red = reduce_constant(s, mu);
  Json out = to_json(red);
  out["scenario"] = scenario_json(s);
  if (lat) {
    const DiscreteHamiltonian H = assemble(s, mu, *h, *lat);
    out["isospectral"] = to_json(verify_reduction_isospectral(red.reduced, H, levels));
    out["warnings"] = H.warnings;
  }
  return out;
}

Json run_sweep(const Json& options) {
  ObjectReader in(options, "options");
  in.touch("sweep");
  const SweepSpec spec = sweep_spec_from_json(in.has("sweep") ? in.raw("sweep") : Json::object(), "sweep");
  const int workers = in.integer("workers", 1);
  if (workers < 1) throw InvalidArgument("must be positive", "workers");
  const std::string dir = in.string("out", "");
  in.finish();

  SweepOutput out;
  out.spec = spec;
  const auto t0 = std::chrono::steady_clock::now();
  out.records = run_remainder_sweep(spec, workers, &out.wall_seconds);
  out.total_wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Scenario s = make_scenario(spec.scenario, spec.overrides);
  try {
    out.fit = fit_scaling(out.records, predicted_exponent(s.dimension, spec.effective_kappa()));
  } catch (const InvalidArgument& e) {
    out.fit_error = e.what();
  }
  if (!dir.empty()) persist_sweep(out, dir);
  Json j = run_json(out);
  if (!dir.empty()) j["out"] = dir;
  return j;
}

}  // namespace magweyl

#include "core/json_io.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace magweyl {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_or_null(v(i)));
  return out;
}

Json to_json(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(number_or_null(m(i, k)));
    out.push_back(std::move(row));
  }
  return out;
}

Json groups_to_json(const Groups& g) {
  Json out = Json::array();
  for (const auto& group : g) {
    Json row = Json::array();
    for (int i : group) row.push_back(i + 1);
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const ResonanceRelation& r) {
  return Json{{"gamma", r.gamma}, {"order", r.order}, {"residual", r.residual}};
}

Json to_json(const ConditionReport& r) {
  Json j{{"condition", condition_name(r.id)},
         {"satisfied", r.satisfied},
         {"margin", number_or_null(r.margin)},
         {"witness", to_json(r.witness)}};
  if (!r.witness_alpha.empty()) j["witness_alpha"] = r.witness_alpha;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json to_json(const IntegralResult& r) {
  return Json{{"value", r.value},
              {"quad_error_estimate", r.quad_error_estimate},
              {"active_levels", r.active_levels},
              {"cells", r.cells},
              {"refined_cells", r.refined_cells}};
}

Json to_json(const CountResult& r) {
  Json diag = Json::object();
  const auto& d = r.diagnostics;
  if (d.min_eigenvalue) diag["min_eigenvalue"] = *d.min_eigenvalue;
  if (d.max_eigenvalue) diag["max_eigenvalue"] = *d.max_eigenvalue;
  if (d.distance_to_tau) diag["distance_to_tau"] = number_or_null(*d.distance_to_tau);
  if (d.min_abs_pivot) diag["min_abs_pivot"] = *d.min_abs_pivot;
  if (d.max_abs_pivot) diag["max_abs_pivot"] = *d.max_abs_pivot;
  if (d.pivot_growth) diag["pivot_growth"] = *d.pivot_growth;
  if (d.negative_pivots) diag["negative_pivots"] = *d.negative_pivots;
  if (d.envelope) diag["envelope"] = *d.envelope;
  if (d.bloch_axis) diag["bloch_axis"] = *d.bloch_axis + 1;
  if (d.bloch_stride) diag["bloch_stride"] = *d.bloch_stride;
  return Json{{"count", r.count}, {"method", count_method_name(r.method)}, {"jitter", r.jitter},
              {"diagnostics", diag}};
}

Json to_json(const Reduction& r) {
  const auto& p = r.pipeline;
  Json steps = Json::array();
  for (const auto& s : p.steps)
    steps.push_back(Json{{"name", s.name}, {"matrix", to_json(s.matrix)}, {"shift", to_json(s.shift)}});
  Json fourier = Json::array();
  for (int i : p.step3_fourier) fourier.push_back(i + 1);
  const auto& red = r.reduced;
  return Json{
      {"pipeline",
       {{"step1_Q", to_json(p.step1_Q)},
        {"step2_S", to_json(p.step2_S)},
        {"step2_s0", to_json(p.step2_s0)},
        {"step3_fourier", fourier},
        {"step4_K", to_json(p.step4_K)},
        {"step5_scale", to_json(p.step5_scale)},
        {"steps", steps},
        {"composite", to_json(p.composite)},
        {"composite_shift", to_json(p.composite_shift)},
        {"symplectic_residual", p.symplectic_residual},
        {"symbol_residual", p.symbol_residual},
        {"symbol_samples", p.symbol_samples}}},
      {"reduced",
       {{"frequencies", red.frequencies},
        {"mu", red.mu},
        {"substitution", to_json(red.substitution)},
        {"substitution_shift", to_json(red.substitution_shift)},
        {"oscillator_part", red.oscillator_part},
        {"liouville", red.liouville},
        {"constant_potential", red.constant_potential},
        {"potential_constant", red.constant_potential ? Json(red.potential_constant) : Json(nullptr)}}}};
}

Json to_json(const IsospectralReport& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels)
    levels.push_back(Json{{"predicted", l.predicted},
                          {"multiplicity", l.multiplicity},
                          {"mean", l.mean},
                          {"width", l.width},
                          {"deviation", l.deviation},
                          {"alpha", l.alpha}});
  return Json{{"levels", levels},
              {"degeneracy", r.degeneracy},
              {"min_gap", r.min_gap},
              {"max_deviation", r.max_deviation},
              {"spacing", r.spacing}};
}

Json to_json(const DegeneracyReport& r) {
  return Json{{"predicted", r.predicted},
              {"expected", r.expected},
              {"measured", r.measured},
              {"cluster_centers", r.cluster_centers},
              {"cluster_widths", r.cluster_widths},
              {"exact", r.exact}};
}

Json to_json(const RemainderRecord& r) {
  return Json{{"h", r.h},
              {"mu", r.mu},
              {"n", r.n},
              {"N", r.N},
              {"method", r.method},
              {"numeric", r.numeric},
              {"principal", r.principal},
              {"R", r.R},
              {"relative", r.relative},
              {"quad_error", r.quad_error},
              {"mu1_star", r.mu1_star},
              {"mu2_star", r.mu2_star},
              {"condition_margin", number_or_null(r.condition_margin)},
              {"condition_met", r.condition_met},
              {"quad_flag", r.quad_flag},
              {"flagged", r.flagged()},
              {"note", r.note}};
}

Json to_json(const FitResult& r) {
  return Json{{"slope", r.slope},
              {"intercept", r.intercept},
              {"residual", r.residual},
              {"points", r.points},
              {"skipped_zero", r.skipped_zero},
              {"predicted_exponent", r.predicted_exponent ? Json(*r.predicted_exponent) : Json(nullptr)}};
}

Json to_json(const SweepSpec& s) {
  Json psi{{"kind", s.psi.kind}};
  if (!s.psi.center.empty()) psi["center"] = s.psi.center;
  if (!s.psi.half_width.empty()) psi["half_width"] = s.psi.half_width;
  if (!s.psi.lower.empty()) psi["lower"] = s.psi.lower;
  if (!s.psi.upper.empty()) psi["upper"] = s.psi.upper;
  if (!s.psi.full_axes.empty()) psi["full_axes"] = s.psi.full_axes;
  Json bc = Json::array();
  for (Boundary b : s.boundary) bc.push_back(boundary_name(b));
  Json j{{"scenario", s.scenario},
         {"overrides", Json(s.overrides)},
         {"psi", psi},
         {"regime", regime_name(s.regime)},
         {"kappa", s.effective_kappa()},
         {"c", s.c},
         {"h_list", s.h_list},
         {"points_per_wavelength", s.points_per_wavelength},
         {"tau", s.tau},
         {"boundary", bc},
         {"quad_resolution", s.quad_resolution},
         {"eps1", s.eps1},
         {"gap_regime", s.gap_regime},
         {"dense_budget", s.dense_budget}};
  return j;
}

// ---------------------------------------------------------------------------

ObjectReader::ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw InvalidArgument("expected an object", path_);
}

bool ObjectReader::has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

const Json& ObjectReader::raw(const std::string& key) {
  seen_.insert(key);
  if (!j_.contains(key)) throw InvalidArgument("missing required key", field(key));
  return j_.at(key);
}

double ObjectReader::number(const std::string& key, double fallback) {
  seen_.insert(key);
  return has(key) ? number(key) : fallback;
}

double ObjectReader::number(const std::string& key) {
  const Json& v = raw(key);
  if (!v.is_number()) throw InvalidArgument("expected a number", field(key));
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidArgument("expected a finite number", field(key));
  return x;
}

int ObjectReader::integer(const std::string& key, int fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const Json& v = j_.at(key);
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::round(x) && std::abs(x) < 2e9) return static_cast<int>(x);
  }
  throw InvalidArgument("expected an integer", field(key));
}

bool ObjectReader::boolean(const std::string& key, bool fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const Json& v = j_.at(key);
  if (!v.is_boolean()) throw InvalidArgument("expected true or false", field(key));
  return v.get<bool>();
}

std::string ObjectReader::string(const std::string& key, const std::string& fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const Json& v = j_.at(key);
  if (!v.is_string()) throw InvalidArgument("expected a string", field(key));
  return v.get<std::string>();
}

std::vector<double> ObjectReader::numbers(const std::string& key) {
  seen_.insert(key);
  std::vector<double> out;
  if (!has(key)) return out;
  const Json& v = j_.at(key);
  if (!v.is_array()) throw InvalidArgument("expected a list of numbers", field(key));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string f = field(key) + "[" + std::to_string(i) + "]";
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) throw InvalidArgument("expected a finite number", f);
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<int> ObjectReader::integers(const std::string& key) {
  std::vector<int> out;
  const std::vector<double> xs = numbers(key);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] != std::round(xs[i]) || std::abs(xs[i]) > 2e9)
      throw InvalidArgument("expected an integer", field(key) + "[" + std::to_string(i) + "]");
    out.push_back(static_cast<int>(xs[i]));
  }
  return out;
}

std::vector<std::string> ObjectReader::strings(const std::string& key) {
  seen_.insert(key);
  std::vector<std::string> out;
  if (!has(key)) return out;
  const Json& v = j_.at(key);
  if (!v.is_array()) throw InvalidArgument("expected a list of strings", field(key));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw InvalidArgument("expected a string", field(key) + "[" + std::to_string(i) + "]");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

void ObjectReader::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it)
    if (!seen_.contains(it.key())) throw InvalidArgument("unknown key '" + it.key() + "'", field(it.key()));
}

ParameterMap parameters_from_json(const Json& j, const std::string& path) {
  ParameterMap out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw InvalidArgument("expected an object of numbers", path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number()) throw InvalidArgument("expected a number", path + "." + it.key());
    out[it.key()] = it.value().get<double>();
  }
  return out;
}

RemainderRecord record_from_json(const Json& j, const std::string& path) {
  ObjectReader in(j, path);
  RemainderRecord r;
  r.h = in.number("h");
  r.mu = in.number("mu");
  r.n = in.integer("n", 0);
  const Json& N = in.raw("N");
  if (!N.is_number_unsigned()) throw InvalidArgument("expected a nonnegative integer", in.field("N"));
  r.N = N.get<std::size_t>();
  r.method = in.string("method", "");
  r.numeric = in.number("numeric");
  r.principal = in.number("principal");
  r.R = in.number("R");
  r.relative = in.number("relative");
  r.quad_error = in.number("quad_error");
  r.mu1_star = in.number("mu1_star");
  r.mu2_star = in.number("mu2_star");
  in.touch("condition_margin");
  r.condition_margin = in.has("condition_margin") ? in.number("condition_margin")
                                                  : std::numeric_limits<double>::infinity();
  r.condition_met = in.boolean("condition_met", true);
  r.quad_flag = in.boolean("quad_flag", false);
  in.boolean("flagged", false);
  r.note = in.string("note", "");
  in.finish();
  return r;
}

CutoffSpec cutoff_spec_from_json(const Json& j, const std::string& path) {
  CutoffSpec c;
  std::string field = path;
  if (j.is_string()) {
    c.kind = j.get<std::string>();
  } else {
    ObjectReader p(j, path);
    c.kind = p.string("kind", c.kind);
    c.center = p.numbers("center");
    c.half_width = p.numbers("half_width");
    c.lower = p.numbers("lower");
    c.upper = p.numbers("upper");
    c.full_axes = p.integers("full_axes");
    p.finish();
    field = p.field("kind");
  }
  if (c.kind != "bump" && c.kind != "indicator" && c.kind != "one")
    throw InvalidArgument("unknown cutoff kind '" + c.kind + "'", field);
  return c;
}

SweepSpec sweep_spec_from_json(const Json& j, const std::string& path) {
  ObjectReader in(j, path);
  SweepSpec s;
  s.scenario = in.string("scenario", s.scenario);
  in.touch("overrides");
  if (in.has("overrides")) s.overrides = parameters_from_json(in.raw("overrides"), in.field("overrides"));
  in.touch("psi");
  if (in.has("psi")) s.psi = cutoff_spec_from_json(in.raw("psi"), in.field("psi"));
  if (in.has("regime")) s.regime = parse_regime(in.string("regime", ""));
  if (in.has("kappa")) s.kappa = in.number("kappa");
  s.c = in.number("c", s.c);
  if (in.has("h_list")) s.h_list = in.numbers("h_list");
  s.points_per_wavelength = in.number("points_per_wavelength", s.points_per_wavelength);
  s.tau = in.number("tau", s.tau);
  const auto bc = in.strings("boundary");
  for (std::size_t i = 0; i < bc.size(); ++i) {
    try {
      s.boundary.push_back(parse_boundary(bc[i]));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(e.what(), in.field("boundary") + "[" + std::to_string(i) + "]");
    }
  }
  s.quad_resolution = in.integer("quad_resolution", s.quad_resolution);
  s.eps1 = in.number("eps1", s.eps1);
  s.gap_regime = in.boolean("gap_regime", s.gap_regime);
  const int budget = in.integer("dense_budget", static_cast<int>(s.dense_budget));
  if (budget < 1) throw InvalidArgument("dense_budget must be positive", in.field("dense_budget"));
  s.dense_budget = static_cast<std::size_t>(budget);
  in.finish();
  s.validate();
  return s;
}

}  // namespace magweyl

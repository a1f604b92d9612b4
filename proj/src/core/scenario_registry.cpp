#include "core/scenario_registry.hpp"

#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace magweyl {

namespace {

ParameterMap merged(const ScenarioInfo& info, const ParameterMap& overrides) {
  ParameterMap p = info.defaults;
  for (const auto& [key, value] : overrides) {
    if (!p.contains(key))
      throw InvalidArgument("unknown parameter '" + key + "' for scenario " + info.name,
                            "scenario." + key);
    if (!std::isfinite(value)) throw InvalidArgument("parameter must be finite", "scenario." + key);
    p[key] = value;
  }
  return p;
}

// Side length of a square torus plane carrying `flux` quanta of field B.
double plane_length(double length, double flux, double field, std::optional<double> mu,
                    std::optional<double> h, const std::string& key) {
  if (length > 0.0) return length;
  if (!mu || !h) return 1.0;
  require(flux >= 1.0 && std::abs(flux - std::round(flux)) < 1e-12, "flux must be a positive integer",
          "scenario." + key);
  require(field > 0.0, "field must be positive for a flux-quantized torus", "scenario.field");
  return std::sqrt(2.0 * std::numbers::pi * flux * *h / (*mu * field));
}

Box cube(const std::vector<double>& lengths) {
  Box b;
  b.lower = Vec::Zero(static_cast<Eigen::Index>(lengths.size()));
  b.upper = Vec::Map(lengths.data(), static_cast<Eigen::Index>(lengths.size()));
  return b;
}

void set_constant_coefficients(Scenario& s, const Mat& g, const Mat& slope, double v0) {
  s.metric = [g](const Vec&) { return g; };
  s.constant_metric = true;
  s.affine_gauge = AffineGauge{slope, Vec::Zero(slope.rows())};
  s.vector_potential = [slope](const Vec& x) -> Vec { return slope * x; };
  s.potential_jacobian = [slope](const Vec&) { return slope; };
  s.scalar_potential = [v0](const Vec&) { return v0; };
  const int d = static_cast<int>(g.rows());
  s.scalar_gradient = [d](const Vec&) -> Vec { return Vec::Zero(d); };
}

Scenario make_const2d(const ParameterMap& p, std::optional<double> mu, std::optional<double> h) {
  const double B = p.at("field");
  const double L = plane_length(p.at("length"), p.at("flux"), B, mu, h, "flux");
  Scenario s;
  s.name = "const2d";
  s.dimension = 2;
  s.domain = cube({L, L});
  Mat slope = Mat::Zero(2, 2);
  slope(1, 0) = B;  // V = (0, B x_1)
  set_constant_coefficients(s, Mat::Identity(2, 2), slope, p.at("v0"));
  s.analytic = AnalyticAnswers{{std::abs(B)}};
  return s;
}

Scenario make_const4d(const ParameterMap& p) {
  const double L = p.at("length");
  Scenario s;
  s.name = "const4d";
  s.dimension = 4;
  s.domain = cube({L, L, L, L});
  Mat g = Mat::Identity(4, 4);
  g(2, 2) = g(3, 3) = p.at("metric2");
  Mat slope = Mat::Zero(4, 4);
  slope(1, 0) = p.at("field1");
  slope(3, 2) = p.at("field2");
  set_constant_coefficients(s, g, slope, p.at("v0"));
  std::vector<double> f{std::abs(p.at("field1")), std::abs(p.at("field2")) * p.at("metric2")};
  std::sort(f.begin(), f.end(), std::greater<>());
  s.analytic = AnalyticAnswers{f};
  return s;
}

Scenario make_resonant4d(const ParameterMap& p, std::optional<double> mu, std::optional<double> h) {
  const double B1 = p.at("field1"), B2 = p.at("field2");
  const double L1 = plane_length(p.at("length1"), p.at("flux1"), B1, mu, h, "flux1");
  const double L2 = plane_length(p.at("length2"), p.at("flux2"), B2, mu, h, "flux2");
  Scenario s;
  s.name = "resonant4d";
  s.dimension = 4;
  s.domain = cube({L1, L1, L2, L2});
  Mat slope = Mat::Zero(4, 4);
  slope(1, 0) = B1;
  slope(3, 2) = B2;
  set_constant_coefficients(s, Mat::Identity(4, 4), slope, p.at("v0"));
  std::vector<double> f{std::abs(B1), std::abs(B2)};
  std::sort(f.begin(), f.end(), std::greater<>());
  s.analytic = AnalyticAnswers{f};
  return s;
}

Scenario make_varV2d(const ParameterMap& p) {
  const double B = p.at("field"), v0 = p.at("v0"), slope_v = p.at("v_slope");
  const double L1 = p.at("length1"), L2 = p.at("length2");
  require(L1 > 0.0 && L2 > 0.0, "lengths must be positive", "scenario.length1");
  Scenario s;
  s.name = "varV2d";
  s.dimension = 2;
  s.domain = cube({L1, L2});
  // Landau gauge centred on the strip, independent of x_1: V = (-B (x_2 - L_2/2), 0).
  Mat slope = Mat::Zero(2, 2);
  slope(0, 1) = -B;
  Vec offset(2);
  offset << B * 0.5 * L2, 0.0;
  s.metric = [](const Vec&) -> Mat { return Mat::Identity(2, 2); };
  s.constant_metric = true;
  s.affine_gauge = AffineGauge{slope, offset};
  s.vector_potential = [slope, offset](const Vec& x) -> Vec { return slope * x + offset; };
  s.potential_jacobian = [slope](const Vec&) { return slope; };
  s.scalar_potential = [v0, slope_v](const Vec& x) { return v0 + slope_v * x(1); };
  s.scalar_gradient = [slope_v](const Vec&) -> Vec { return Vec{{0.0, slope_v}}; };
  s.analytic = AnalyticAnswers{{std::abs(B)}};
  return s;
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_catalog() {
  static const std::vector<ScenarioInfo> catalog{
      {"const2d", "2D constant field V=(0,B x1), g=I, constant V; square torus",
       {{"field", 1.0}, {"v0", -1.0}, {"flux", 12.0}, {"length", 0.0}}},
      {"const4d", "4D constant field, g=diag(1,1,m,m), planes (x1,x2),(x3,x4)",
       {{"field1", 1.0}, {"field2", 0.8}, {"metric2", 2.0}, {"v0", -1.0}, {"length", 1.0}}},
      {"varV2d", "2D constant field, V = v0 + v_slope*x2, periodic in x1",
       {{"field", 1.0}, {"v0", -1.0}, {"v_slope", 0.3}, {"length1", 2.0}, {"length2", 2.0}}},
      {"resonant4d", "4D constant field with f=(2,1) (resonant), g=I; torus",
       {{"field1", 1.0}, {"field2", 2.0}, {"flux1", 3.0}, {"flux2", 2.0}, {"v0", -1.0},
        {"length1", 0.0}, {"length2", 0.0}}},
  };
  return catalog;
}

Scenario make_scenario(const std::string& name, const ParameterMap& overrides, std::optional<double> mu,
                       std::optional<double> h) {
  for (const ScenarioInfo& info : scenario_catalog()) {
    if (info.name != name) continue;
    const ParameterMap p = merged(info, overrides);
    Scenario s;
    if (name == "const2d") s = make_const2d(p, mu, h);
    else if (name == "const4d") s = make_const4d(p);
    else if (name == "varV2d") s = make_varV2d(p);
    else s = make_resonant4d(p, mu, h);
    s.validate();
    return s;
  }
  throw InvalidArgument("unknown scenario '" + name + "'", "scenario.name");
}

Scenario rotate_scenario(const Scenario& s, const Mat& O) {
  require(O.rows() == s.dimension && O.cols() == s.dimension, "rotation has wrong size");
  require((O.transpose() * O - Mat::Identity(s.dimension, s.dimension)).cwiseAbs().maxCoeff() < 1e-12,
          "matrix is not orthogonal");
  Scenario out = s;
  out.name = s.name + "-rotated";
  const Mat Ot = O.transpose();
  auto metric = s.metric;
  auto potential = s.vector_potential;
  auto scalar = s.scalar_potential;
  out.metric = [metric, O, Ot](const Vec& y) -> Mat { return Ot * metric(O * y) * O; };
  out.vector_potential = [potential, O, Ot](const Vec& y) -> Vec { return Ot * potential(O * y); };
  out.scalar_potential = [scalar, O](const Vec& y) { return scalar(O * y); };
  if (s.potential_jacobian) {
    auto jac = s.potential_jacobian;
    out.potential_jacobian = [jac, O, Ot](const Vec& y) -> Mat { return Ot * jac(O * y) * O; };
  }
  if (s.scalar_gradient) {
    auto grad = s.scalar_gradient;
    out.scalar_gradient = [grad, O, Ot](const Vec& y) -> Vec { return Ot * grad(O * y); };
  }
  if (s.affine_gauge) out.affine_gauge = AffineGauge{Ot * s.affine_gauge->slope * O, Ot * s.affine_gauge->offset};
  // Bounding box of the rotated corners.
  const int d = s.dimension;
  Vec lo = Vec::Constant(d, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec corner(d);
    for (int a = 0; a < d; ++a) corner(a) = (mask >> a & 1) ? s.domain.upper(a) : s.domain.lower(a);
    const Vec y = Ot * corner;
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  out.domain = Box{lo, hi};
  return out;
}

}  // namespace magweyl

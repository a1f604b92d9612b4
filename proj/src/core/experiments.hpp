#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/lattice.hpp"
#include "core/resonance.hpp"
#include "core/scenario_registry.hpp"
#include "core/spectrum.hpp"
#include "core/weyl.hpp"

namespace magweyl {

enum class Regime { Weak, Intermediate, Strong, Superstrong };

Regime parse_regime(const std::string& name);
std::string regime_name(Regime r);
double default_kappa(Regime r);  // 0.4, 0.5, 0.75, 1.0

// Cutoff description independent of a concrete domain; resolved per scenario.
struct CutoffSpec {
  std::string kind = "bump";  // bump | indicator | one
  std::vector<double> center;      // bump
  std::vector<double> half_width;  // bump
  std::vector<double> lower;       // indicator
  std::vector<double> upper;       // indicator
  std::vector<int> full_axes;      // 1-based axes along which psi is constant

  // Empty vectors default to a bump centred in the domain with half-width 0.2 L
  // on non-periodic axes and full extent on periodic ones.
  CutoffFunction resolve(const Box& domain, const std::vector<Boundary>& boundary) const;
};

struct SweepSpec {
  std::string scenario = "varV2d";
  ParameterMap overrides;
  CutoffSpec psi;
  Regime regime = Regime::Intermediate;
  std::optional<double> kappa;  // overrides the regime default
  double c = 1.0;               // mu = c h^{-kappa}
  std::vector<double> h_list{1.0 / 8, 1.0 / 12, 1.0 / 16, 1.0 / 24, 1.0 / 32};
  double points_per_wavelength = 10.0;
  double tau = 0.0;
  std::vector<Boundary> boundary;  // empty: scenario default
  int quad_resolution = 0;         // 0: follows the lattice, at least 128
  double eps1 = 0.0;
  bool gap_regime = false;         // check the gap condition instead of microhyperbolicity
  std::size_t dense_budget = kDenseBudget;

  double effective_kappa() const { return kappa.value_or(default_kappa(regime)); }
  void validate() const;
};

std::vector<Boundary> default_boundaries(const std::string& scenario, int dimension);

// Lattice rule n(h) = ceil(points_per_wavelength * L_a / h) per axis.
Lattice sweep_lattice(const Scenario& s, double h, double ppw, const std::vector<Boundary>& bc);

struct RemainderRecord {
  double h = 0.0;
  double mu = 0.0;
  int n = 0;              // largest points per axis
  std::size_t N = 0;      // lattice size
  std::string method;     // local_trace_bloch | local_trace_dense | subbox_count
  double numeric = 0.0;
  double principal = 0.0;
  double R = 0.0;
  double relative = 0.0;
  double quad_error = 0.0;
  double mu1_star = 0.0;
  double mu2_star = 0.0;
  double condition_margin = 0.0;
  bool condition_met = true;
  bool quad_flag = false;  // quadrature error above 10% of R
  std::string note;

  bool flagged() const { return !condition_met || quad_flag; }
};

// mu_1^* = eps h^{-1/2} |log h|^{-1/2}, mu_2^* = eps h^{-1} |log h|^{-1} with eps = 1.
double mu1_star(double h);
double mu2_star(double h);

RemainderRecord run_sweep_point(const SweepSpec& spec, double h);

// Records ordered by h descending regardless of completion order. Per-point
// wall times go to `wall_seconds` when given (same order).
std::vector<RemainderRecord> run_remainder_sweep(const SweepSpec& spec, int workers = 1,
                                                 std::vector<double>* wall_seconds = nullptr);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square of the fit residuals
  int points = 0;
  int skipped_zero = 0;
  std::optional<double> predicted_exponent;
};

// Least squares of log R against log(1/h) over unflagged records.
FitResult fit_scaling(const std::vector<RemainderRecord>& records,
                      std::optional<double> predicted_exponent = std::nullopt);

// (d - 1) - kappa: the exponent of mu^{-1} h^{1-d} with mu = c h^{-kappa}.
double predicted_exponent(int dimension, double kappa);

struct DegeneracyReport {
  double predicted = 0.0;  // (2 pi)^{-r} (mu/h)^r f_1..f_r sqrt(g) vol
  std::vector<int> expected;  // predicted multiplicity times the number of alpha at each energy
  std::vector<int> measured;  // multiplicities of the lowest clusters
  std::vector<double> cluster_centers;
  std::vector<double> cluster_widths;
  bool exact = false;
};

// Splits the low spectrum into clusters at gaps wider than half the smallest
// predicted level gap.
DegeneracyReport degeneracy_test(const Scenario& s, double mu, double h, const Lattice& lattice, int clusters);

}  // namespace magweyl

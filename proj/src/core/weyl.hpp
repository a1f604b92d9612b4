#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/geometry.hpp"

namespace magweyl {

struct WeylParams {
  double mu = 1.0;
  double h = 1.0;
  double tau = 0.0;

  void validate() const;  // mu >= 1, h in (0, 1]
};

struct LandauLevel {
  std::vector<int> alpha;
  double energy = 0.0;  // sum (2 alpha_j + 1) f_j
};

inline constexpr std::size_t kLevelGuard = 1'000'000;

// Every alpha with E_alpha <= cap, ascending by energy then lexicographically.
std::vector<LandauLevel> landau_levels(const std::vector<double>& f, double cap,
                                       std::size_t guard = kLevelGuard);

// Visits E_alpha <= cap without materializing the list. Returns the number visited.
std::int64_t for_each_level(const std::vector<double>& f, double cap,
                            const std::function<void(const std::vector<int>&, double)>& visit,
                            std::size_t guard = kLevelGuard);

// #{alpha : E_alpha <= cap}.
std::int64_t count_levels(const std::vector<double>& f, double cap, std::size_t guard = kLevelGuard);

double unit_ball_volume(int k);

// Theta(0) = 1: a level exactly at tau is counted. Ties are resolved with a
// relative tolerance of 1e-13.
double magnetic_weyl_full_rank(const Scenario& s, const Vec& x, const WeylParams& p);
double magnetic_weyl_general(const Scenario& s, const Vec& x, const WeylParams& p);
double standard_weyl(const Scenario& s, const Vec& x, const WeylParams& p);

enum class DensityKind { MagneticFullRank, MagneticGeneral, Standard };

struct CutoffFunction {
  enum class Kind { Indicator, Bump };
  Kind kind = Kind::Indicator;
  // Indicator: the sub-box. Bump: centre (lower+upper)/2 and half-widths
  // (upper-lower)/2 of the profile exp(1 - 1/(1 - |y|^2)) in scaled coordinates.
  Box box;
  // Axes along which psi is constant (the cutoff spans the whole domain there;
  // only meaningful on periodic axes).
  std::vector<bool> full_axis;

  double operator()(const Vec& x) const;
  Box support(const Box& domain) const;
  // Support strictly inside the domain on every non-full axis.
  void validate(const Box& domain) const;

  static CutoffFunction indicator(const Box& box);
  static CutoffFunction bump(const Vec& center, const Vec& half_width);
  static CutoffFunction one(int dimension);
};

struct QuadratureSpec {
  int base_resolution = 128;  // cells per axis over the cutoff support
  int refine_factor = 2;      // sub-cells per axis in flagged cells (one level)
  std::size_t budget = 50'000'000;
};

struct IntegralResult {
  double value = 0.0;
  double quad_error_estimate = 0.0;  // |I(n) - I(n/2)|
  int active_levels = 0;             // largest active-level count seen
  std::size_t cells = 0;
  std::size_t refined_cells = 0;
};

// int density(x) psi(x) dx by tensor midpoint cells plus one refinement level
// where the active-level count changes across a cell. The error estimate
// compares against the same rule at half the base resolution. In refined sub-cells the
// full-rank density uses the exact volume fraction of the linearized level
// surfaces {tau = E_alpha mu h + V}.
IntegralResult integrate_density(DensityKind kind, const Scenario& s, const CutoffFunction& psi,
                                 const WeylParams& p, const QuadratureSpec& q);

// Volume fraction of the box prod [-w_a, w_a] on which s0 + grad . y >= 0.
double box_fraction(double s0, const Vec& grad, const Vec& half_width);

}  // namespace magweyl

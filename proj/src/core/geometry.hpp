#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/linalg.hpp"

namespace magweyl {

struct Box {
  Vec lower;
  Vec upper;

  int dimension() const { return static_cast<int>(lower.size()); }
  Vec extent() const { return upper - lower; }
  double diameter() const { return extent().norm(); }
  double volume() const { return extent().prod(); }
  bool contains(const Vec& x, double slack = 0.0) const;
};

// A(x) = slope * x + offset, i.e. A_k(x) = sum_m slope(k, m) x_m + offset_k.
struct AffineGauge {
  Mat slope;
  Vec offset;
};

struct AnalyticAnswers {
  std::vector<double> frequencies;  // descending
};

// Coefficient data of A = sum P_j g^{jk} P_k + V with P_j = h D_j - mu V_j(x).
// Field maps are total functions on R^d; `domain` is where they are sampled.
struct Scenario {
  std::string name;
  int dimension = 0;
  Box domain;
  std::function<Mat(const Vec&)> metric;             // g^{jk}(x), contravariant
  std::function<Vec(const Vec&)> vector_potential;   // (V_1..V_d)(x)
  std::function<Mat(const Vec&)> potential_jacobian; // optional: J(k, j) = d_j V_k
  std::function<double(const Vec&)> scalar_potential;
  std::function<Vec(const Vec&)> scalar_gradient;    // optional
  bool constant_metric = false;
  std::optional<AffineGauge> affine_gauge;           // set iff the vector potential is exactly affine
  std::optional<AnalyticAnswers> analytic;

  bool constant_field() const { return constant_metric && affine_gauge.has_value(); }

  // Sampling checks: symmetric, uniformly elliptic metric (eigenvalues within
  // [1/c, c]) and finite fields on a small grid over the domain.
  void validate(double ellipticity_bound = 1e6, int samples_per_axis = 3) const;
};

// Evenly spaced sample points over a box (midpoints of `per_axis`^d cells).
std::vector<Vec> sample_grid(const Box& box, int per_axis);

Vec scalar_gradient(const Scenario& s, const Vec& x);

struct FrequencyResult {
  std::vector<double> frequencies;  // f_1 >= ... >= f_r > 0
  int rank = 0;                     // 2r
};

// Nonzero spectrum of g F as {+-i f_p}: eigenvalues +-f_p of the Hermitian
// matrix iM with M = g^{1/2} F g^{1/2}, paired.
FrequencyResult characteristic_frequencies(const Mat& g, const Mat& F);

struct FieldIntensity {
  Mat metric;   // g^{jk} at the evaluation point
  Mat F;        // F_{jk}, exactly antisymmetric
  Mat gF;       // F^j_k
  std::vector<double> frequencies;
  int rank = 0;
  std::optional<double> inv_norm;  // |(F^j_k)^{-1}|, empty when singular

  int dimension() const { return static_cast<int>(F.rows()); }
  bool full_rank(double c0 = 1e8) const;
  double frequency_product() const;
};

FieldIntensity make_intensity(const Mat& g, Mat F);

// F_{jk} = d_j V_k - d_k V_j at x; analytic Jacobian when the scenario provides
// one, otherwise central differences with step 1e-5 * diam(domain).
FieldIntensity intensity_matrix(const Scenario& s, const Vec& x);

struct SymplecticFrame {
  Mat basis;                        // x = basis * y
  std::vector<double> frequencies;  // block frequencies, descending
  double residual = 0.0;            // worst off-pattern entry / max f
};

// Basis B with B^{-1} g B^{-T} = I and B^T F B = canonical blocks
// F_{j,j+r} = f_j, F_{j+r,j} = -f_j.
SymplecticFrame symplectic_frame(const FieldIntensity& intensity);

// f_1 ... f_r sqrt(det g_{jk}); cross-checked against |det F|^{1/2}.
double liouville_density(const FieldIntensity& intensity);

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<double> potential;

  double max_potential_drift() const;
};

// Drift flow dx/dt = F^{-1} grad V (rescaled time), classical RK4.
Trajectory drift_flow(const Scenario& s, const Vec& x0, double t_end, double dt);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace magweyl

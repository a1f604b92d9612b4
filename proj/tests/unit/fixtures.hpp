#pragma once

#include <functional>
#include <random>

#include "core/geometry.hpp"

namespace fixtures {

using magweyl::Mat;
using magweyl::Vec;

// Constant metric, affine gauge A = slope x, scalar potential V.
inline magweyl::Scenario constant_field(const Mat& g, const Mat& slope, std::function<double(const Vec&)> V,
                                        std::function<Vec(const Vec&)> gradV, double L = 1.0) {
  const int d = static_cast<int>(g.rows());
  magweyl::Scenario s;
  s.name = "fixture";
  s.dimension = d;
  s.domain = magweyl::Box{Vec::Zero(d), Vec::Constant(d, L)};
  s.metric = [g](const Vec&) { return g; };
  s.constant_metric = true;
  s.affine_gauge = magweyl::AffineGauge{slope, Vec::Zero(d)};
  s.vector_potential = [slope](const Vec& x) -> Vec { return slope * x; };
  s.potential_jacobian = [slope](const Vec&) { return slope; };
  s.scalar_potential = std::move(V);
  s.scalar_gradient = std::move(gradV);
  return s;
}

// 2D, g = I, A = (0, B x1), V = v0 + v2 * x2.
inline magweyl::Scenario plane(double B, double v0, double v2, double L = 1.0) {
  Mat slope = Mat::Zero(2, 2);
  slope(1, 0) = B;
  return constant_field(
      Mat::Identity(2, 2), slope, [v0, v2](const Vec& x) { return v0 + v2 * x(1); },
      [v2](const Vec&) -> Vec { return Vec{{0.0, v2}}; }, L);
}

inline Mat random_spd(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) a(i, k) = u(rng);
  return a * a.transpose() + 0.5 * Mat::Identity(d, d);
}

inline Mat random_skew(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) a(i, k) = u(rng);
  return a - a.transpose();
}

inline Mat random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) a(i, k) = n(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ() * Mat::Identity(d, d);
}

}  // namespace fixtures

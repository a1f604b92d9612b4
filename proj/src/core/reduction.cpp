#include "core/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "core/errors.hpp"
#include "core/spectrum.hpp"
#include "core/weyl.hpp"

namespace magweyl {

namespace {

Mat omega(int d) {
  Mat w = Mat::Zero(2 * d, 2 * d);
  w.topRightCorner(d, d) = Mat::Identity(d, d);
  w.bottomLeftCorner(d, d) = -Mat::Identity(d, d);
  return w;
}

// Points uniformly distributed in the unit ball of R^n, fixed seed.
std::vector<Vec> ball_samples(int n, int count) {
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  std::vector<Vec> out;
  for (int k = 0; k < count; ++k) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    v *= std::pow(unif(rng), 1.0 / n) / v.norm();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

double magnetic_symbol(const Scenario& s, double mu, const Vec& z) {
  const int d = s.dimension;
  const Vec x = z.head(d);
  const Vec p = z.tail(d) - mu * s.vector_potential(x);
  return p.dot(s.metric(x) * p);
}

Reduction reduce_constant(const Scenario& s, double mu) {
  require(std::isfinite(mu) && mu > 0.0, "mu must be positive", "mu");
  if (!s.constant_metric) throw InvalidArgument("reduction needs a constant metric", "scenario");
  if (!s.affine_gauge) throw InvalidArgument("reduction needs a linear vector potential", "scenario");
  const int d = s.dimension;
  const Vec centre = 0.5 * (s.domain.lower + s.domain.upper);
  const FieldIntensity in = intensity_matrix(s, centre);
  if (in.rank != d) throw ComputationError("rank deficient intensity matrix", "scenario");
  const int r = d / 2;
  const SymplecticFrame frame = symplectic_frame(in);
  const std::vector<double>& f = frame.frequencies;
  const Mat& L = s.affine_gauge->slope;
  const Vec& c = s.affine_gauge->offset;

  Reduction out;
  MetaplecticPipeline& P = out.pipeline;
  const Mat Q = frame.basis;
  P.step1_Q = Q;

  // Step 1: x = Q y, xi = Q^{-T} eta.
  AffineStep s1{"change_of_variables", Mat::Zero(2 * d, 2 * d), Vec::Zero(2 * d)};
  s1.matrix.topLeftCorner(d, d) = Q;
  s1.matrix.bottomRightCorner(d, d) = Q.inverse().transpose();

  // Step 2: remove the exact part of Q^T L Q relative to the canonical gauge
  // A_{j+r} = f_j y_j.
  Mat Lc = Mat::Zero(d, d);
  for (int j = 0; j < r; ++j) Lc(j + r, j) = f[j];
  Mat S = Q.transpose() * L * Q - Lc;
  S = 0.5 * (S + S.transpose());
  P.step2_S = S;
  P.step2_s0 = Q.transpose() * c;
  AffineStep s2{"gauge", Mat::Identity(2 * d, 2 * d), Vec::Zero(2 * d)};
  s2.matrix.bottomLeftCorner(d, d) = mu * S;
  s2.shift.tail(d) = mu * P.step2_s0;

  // Step 3: partial Fourier transform in y'' = (y_{r+1}..y_d):
  // y'' = -zeta''/mu, eta'' = mu z''.
  AffineStep s3{"partial_fourier", Mat::Zero(2 * d, 2 * d), Vec::Zero(2 * d)};
  for (int j = 0; j < r; ++j) {
    s3.matrix(j, j) = 1.0;
    s3.matrix(d + j, d + j) = 1.0;
    s3.matrix(r + j, d + r + j) = -1.0 / mu;
    s3.matrix(d + r + j, r + j) = mu;
    P.step3_fourier.push_back(r + j);
  }

  // Step 4: shear z' = u' + K u'', z'' = u''; momenta by the inverse transpose.
  Mat K = Mat::Identity(d, d);
  P.step4_K = Mat::Zero(d, d);
  for (int j = 0; j < r; ++j) {
    K(j, j + r) = 1.0 / f[j];
    P.step4_K(j, j + r) = 1.0 / f[j];
  }
  AffineStep s4{"shear", Mat::Zero(2 * d, 2 * d), Vec::Zero(2 * d)};
  s4.matrix.topLeftCorner(d, d) = K;
  s4.matrix.bottomRightCorner(d, d) = K.inverse().transpose();

  // Step 5: u_j = w_j / sqrt(f_j), nu_j = sqrt(f_j) pi_j for j < r.
  P.step5_scale = Vec::Ones(d);
  AffineStep s5{"normalization", Mat::Identity(2 * d, 2 * d), Vec::Zero(2 * d)};
  for (int j = 0; j < r; ++j) {
    const double q = std::sqrt(f[j]);
    P.step5_scale(j) = 1.0 / q;
    s5.matrix(j, j) = 1.0 / q;
    s5.matrix(d + j, d + j) = q;
  }

  P.steps = {s1, s2, s3, s4, s5};
  P.composite = Mat::Identity(2 * d, 2 * d);
  P.composite_shift = Vec::Zero(2 * d);
  for (const AffineStep& st : P.steps) {
    // z_old = C (M z + t) + b  =>  C M, C t + b
    P.composite_shift += P.composite * st.shift;
    P.composite = P.composite * st.matrix;
  }

  const Mat W = omega(d);
  const Mat& J = P.composite;
  P.symplectic_residual =
      (J.transpose() * W * J - W).cwiseAbs().maxCoeff() / std::max(1.0, J.cwiseAbs().maxCoeff() * J.cwiseAbs().maxCoeff());

  P.symbol_samples = kSymbolSamples;
  double worst = 0.0;
  for (const Vec& z : ball_samples(2 * d, kSymbolSamples)) {
    const Vec zo = J * z + P.composite_shift;
    const double a = magnetic_symbol(s, mu, zo);
    double target = 0.0;
    for (int j = 0; j < r; ++j) target += f[j] * (z(d + j) * z(d + j) + mu * mu * z(j) * z(j));
    worst = std::max(worst, std::abs(a - target) / std::max(1.0, std::abs(target)));
  }
  P.symbol_residual = worst;

  ReducedForm& R = out.reduced;
  R.frequencies = f;
  R.mu = mu;
  R.substitution = J.topRows(d);
  R.substitution_shift = P.composite_shift.head(d);
  R.oscillator_part = "sum_j f_j (h^2 D_j^2 + mu^2 x_j^2), j = 1.." + std::to_string(r);
  R.liouville = liouville_density(in);
  R.volume = s.domain.volume();
  const double v0 = s.scalar_potential(centre);
  R.potential_constant = v0;
  R.constant_potential = true;
  for (const Vec& x : sample_grid(s.domain, 4))
    if (std::abs(s.scalar_potential(x) - v0) > 1e-12 * std::max(1.0, std::abs(v0))) R.constant_potential = false;
  return out;
}

IsospectralReport verify_reduction_isospectral(const ReducedForm& reduced, const DiscreteHamiltonian& H, int k) {
  require(k >= 1, "k must be positive", "k");
  if (!reduced.constant_potential)
    throw InvalidArgument("isospectral check needs a constant potential", "scenario");
  const double mh = H.mu * H.h;
  const int r = static_cast<int>(reduced.frequencies.size());
  IsospectralReport rep;
  rep.degeneracy = std::pow(2.0 * M_PI, -r) * std::pow(H.mu / H.h, r) * reduced.liouville * H.lattice.domain.volume();
  const double D = std::round(rep.degeneracy);
  if (std::abs(rep.degeneracy - D) > 1e-6 * std::max(1.0, D) || D < 1.0)
    throw InvalidArgument("Landau level degeneracy is not an integer (flux not quantized)", "scenario");
  for (int a = 0; a < H.lattice.dimension(); ++a) rep.spacing = std::max(rep.spacing, H.lattice.spacing(a));

  // Distinct predicted energies with their alpha counts; grow the cap until k are known.
  std::vector<LevelComparison> levels;
  double ground = 0.0;
  for (double v : reduced.frequencies) ground += v;
  double cap = ground;
  for (;;) {
    levels.clear();
    const auto all = landau_levels(reduced.frequencies, cap);
    for (const auto& lv : all) {
      if (!levels.empty() && std::abs(lv.energy - levels.back().predicted) <= 1e-9 * lv.energy) {
        levels.back().multiplicity += 1;
        continue;
      }
      LevelComparison lc;
      lc.predicted = lv.energy;
      lc.multiplicity = 1;
      lc.alpha = lv.alpha;
      levels.push_back(lc);
    }
    if (static_cast<int>(levels.size()) > k) break;
    cap += 2.0 * reduced.frequencies.back() + ground;
  }
  // Levels k (0-based) is only used for the gap above the last compared cluster.
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) rep.min_gap = std::min(rep.min_gap, (levels[i + 1].predicted - levels[i].predicted) * mh);
  for (auto& lc : levels) {
    lc.predicted = lc.predicted * mh + reduced.potential_constant;
    lc.multiplicity *= static_cast<int>(D);
  }

  std::size_t needed = 0;
  for (int i = 0; i < k; ++i) needed += static_cast<std::size_t>(levels[i].multiplicity);
  const double upper = levels[k - 1].predicted + 0.5 * rep.min_gap;
  const auto w = eigenvalues(H, EigenMethod::Auto, upper);
  if (w.size() < needed)
    throw ComputationError("oracle resolution too coarse: clusters below the expected count", "n");

  std::size_t pos = 0;
  for (int i = 0; i < k; ++i) {
    LevelComparison lc = levels[i];
    const auto first = w.begin() + static_cast<std::ptrdiff_t>(pos);
    const auto last = first + lc.multiplicity;
    double sum = 0.0, dev = 0.0;
    for (auto it = first; it != last; ++it) {
      sum += *it;
      dev = std::max(dev, std::abs(*it - lc.predicted));
    }
    lc.mean = sum / lc.multiplicity;
    lc.width = *(last - 1) - *first;
    lc.deviation = dev;
    if (lc.width > 0.5 * rep.min_gap)
      throw ComputationError("oracle resolution too coarse: cluster width exceeds half the level gap", "n");
    rep.max_deviation = std::max(rep.max_deviation, dev);
    rep.levels.push_back(lc);
    pos += static_cast<std::size_t>(lc.multiplicity);
  }
  return rep;
}

}  // namespace magweyl

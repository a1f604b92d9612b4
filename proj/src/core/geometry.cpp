#include "core/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "core/errors.hpp"

namespace magweyl {

namespace {

constexpr double kPairingTol = 1e-8;
constexpr double kZeroFrequencyTol = 1e-10;

bool all_finite(const Mat& m) { return m.allFinite(); }

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Jacobian J(k, j) = d_j V_k by central differences at step delta.
Mat central_jacobian(const Scenario& s, const Vec& x, double delta) {
  const int d = s.dimension;
  Mat J(d, d);
  for (int j = 0; j < d; ++j) {
    Vec xp = x, xm = x;
    xp(j) += delta;
    xm(j) -= delta;
    J.col(j) = (s.vector_potential(xp) - s.vector_potential(xm)) / (2.0 * delta);
  }
  return J;
}

}  // namespace

bool Box::contains(const Vec& x, double slack) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) < lower(i) - slack || x(i) > upper(i) + slack) return false;
  return true;
}

std::vector<Vec> sample_grid(const Box& box, int per_axis) {
  const int d = box.dimension();
  std::vector<Vec> pts;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  const Vec step = box.extent() / per_axis;
  while (true) {
    Vec x(d);
    for (int a = 0; a < d; ++a) x(a) = box.lower(a) + (idx[a] + 0.5) * step(a);
    pts.push_back(std::move(x));
    int a = 0;
    while (a < d && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == d) break;
  }
  return pts;
}

void Scenario::validate(double ellipticity_bound, int samples_per_axis) const {
  require(dimension >= 1, "scenario dimension must be positive", "scenario.dimension");
  require(domain.dimension() == dimension, "domain dimension mismatch", "scenario.domain");
  for (int a = 0; a < dimension; ++a)
    require(domain.upper(a) > domain.lower(a), "domain must have positive extent", "scenario.domain");
  require(static_cast<bool>(metric) && static_cast<bool>(vector_potential) &&
              static_cast<bool>(scalar_potential),
          "scenario is missing a field map", "scenario");
  for (const Vec& x : sample_grid(domain, samples_per_axis)) {
    const Mat g = metric(x);
    if (g.rows() != dimension || g.cols() != dimension || !all_finite(g))
      throw InvalidArgument("metric is not a finite d x d matrix at a sample point", "scenario.metric");
    if (!is_symmetric(g, 1e-12)) throw InvalidArgument("metric is not symmetric", "scenario.metric");
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (lo < 1.0 / ellipticity_bound || hi > ellipticity_bound)
      throw InvalidArgument("metric violates the ellipticity bound", "scenario.metric");
    const Vec A = vector_potential(x);
    if (A.size() != dimension || !A.allFinite())
      throw InvalidArgument("vector potential is not finite", "scenario.vector_potential");
    if (!std::isfinite(scalar_potential(x)))
      throw InvalidArgument("scalar potential is not finite", "scenario.scalar_potential");
  }
}

Vec scalar_gradient(const Scenario& s, const Vec& x) {
  if (s.scalar_gradient) return s.scalar_gradient(x);
  const double delta = 1e-5 * s.domain.diameter();
  Vec g(s.dimension);
  for (int j = 0; j < s.dimension; ++j) {
    Vec xp = x, xm = x;
    xp(j) += delta;
    xm(j) -= delta;
    g(j) = (s.scalar_potential(xp) - s.scalar_potential(xm)) / (2.0 * delta);
  }
  return g;
}

FrequencyResult characteristic_frequencies(const Mat& g, const Mat& F) {
  const Eigen::Index d = g.rows();
  require(g.cols() == d && F.rows() == d && F.cols() == d, "g and F must be square of equal size");
  require(is_symmetric(g, 1e-12), "metric is not symmetric");
  const double fscale = std::max(1.0, F.cwiseAbs().maxCoeff());
  require((F + F.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * fscale, "F is not skew-symmetric");

  const Mat root = spd_sqrt(g);
  Mat M = root * F * root;
  M = 0.5 * (M - M.transpose());
  // The Hermitian matrix iM has eigenvalues +-f_p and zeros; -M^2 = (iM)^2
  // carries the same information squared, which would square the zero threshold.
  const CMat iM = cplx(0.0, 1.0) * M.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> es(iM, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ComputationError("eigen decomposition failed");
  const Vec& ev = es.eigenvalues();  // ascending

  FrequencyResult out;
  const double fmax = ev.cwiseAbs().maxCoeff();
  if (fmax == 0.0) return out;
  std::vector<double> pos, neg;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= kZeroFrequencyTol * fmax) continue;
    (ev(i) > 0 ? pos : neg).push_back(std::abs(ev(i)));
  }
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  if (pos.size() != neg.size())
    throw ComputationError("unpaired eigenvalue in the spectrum of gF (skew structure broken)");
  for (std::size_t p = 0; p < pos.size(); ++p) {
    if (std::abs(pos[p] - neg[p]) > kPairingTol * fmax)
      throw ComputationError("eigenvalues of gF do not pair as +-i f within tolerance");
    out.frequencies.push_back(0.5 * (pos[p] + neg[p]));
  }
  out.rank = 2 * static_cast<int>(out.frequencies.size());
  return out;
}

bool FieldIntensity::full_rank(double c0) const {
  return rank == dimension() && inv_norm.has_value() && *inv_norm <= c0;
}

double FieldIntensity::frequency_product() const {
  return std::accumulate(frequencies.begin(), frequencies.end(), 1.0, std::multiplies<>());
}

FieldIntensity make_intensity(const Mat& g, Mat F) {
  FieldIntensity out;
  out.metric = g;
  out.F = 0.5 * (F - F.transpose());
  out.gF = g * out.F;
  const FrequencyResult fr = characteristic_frequencies(g, out.F);
  out.frequencies = fr.frequencies;
  out.rank = fr.rank;
  if (out.rank == out.dimension() && out.rank > 0) {
    Eigen::JacobiSVD<Mat> svd(out.gF);
    out.inv_norm = 1.0 / svd.singularValues().minCoeff();
  }
  return out;
}

FieldIntensity intensity_matrix(const Scenario& s, const Vec& x) {
  require(x.size() == s.dimension, "point has wrong dimension", "x");
  require(s.domain.contains(x, 1e-12 * s.domain.diameter()), "point lies outside the domain", "x");
  Mat J;
  if (s.potential_jacobian) {
    J = s.potential_jacobian(x);
  } else if (s.affine_gauge) {
    J = s.affine_gauge->slope;
  } else {
    const double delta = 1e-5 * s.domain.diameter();
    const Mat coarse = central_jacobian(s, x, delta);
    const Mat fine = central_jacobian(s, x, 0.5 * delta);
    if (!coarse.allFinite() || !fine.allFinite())
      throw ComputationError("vector potential derivative is not finite", "x");
    const double scale = std::max(1.0, fine.cwiseAbs().maxCoeff());
    if ((coarse - fine).cwiseAbs().maxCoeff() > 1e-4 * scale)
      throw ComputationError("central difference of the vector potential failed the Richardson check", "x");
    J = (4.0 * fine - coarse) / 3.0;
  }
  if (J.rows() != s.dimension || J.cols() != s.dimension || !J.allFinite())
    throw ComputationError("vector potential Jacobian is malformed", "x");
  // F_{jk} = d_j V_k - d_k V_j = J(k, j) - J(j, k)
  return make_intensity(s.metric(x), J.transpose() - J);
}

SymplecticFrame symplectic_frame(const FieldIntensity& in) {
  const int d = in.dimension();
  if (in.rank != d || d == 0) throw ComputationError("rank deficient intensity matrix");
  const int r = d / 2;
  const Mat root = spd_sqrt(in.metric);
  Mat M = root * in.F * root;
  M = 0.5 * (M - M.transpose());

  Eigen::SelfAdjointEigenSolver<Mat> es(M.transpose() * M);
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return es.eigenvalues()(a) > es.eigenvalues()(b); });

  // Greedy pairing inside the (possibly degenerate) eigenspaces of M^T M:
  // u from the next eigenvector not yet spanned, v = M u / |M u|.
  std::vector<Vec> chosen;
  Mat O(d, d);
  SymplecticFrame frame;
  int pairs = 0;
  for (int idx : order) {
    if (pairs == r) break;
    Vec u = es.eigenvectors().col(idx);
    for (const Vec& q : chosen) u -= q.dot(u) * q;
    if (u.norm() < 0.3) continue;
    u.normalize();
    Vec v = M * u;
    for (const Vec& q : chosen) v -= q.dot(v) * q;
    const double f = v.norm();
    v /= f;
    O.col(pairs) = v;
    O.col(pairs + r) = u;
    frame.frequencies.push_back(f);
    chosen.push_back(u);
    chosen.push_back(v);
    ++pairs;
  }
  if (pairs != r) throw ComputationError("could not assemble a symplectic frame");

  // Order blocks by descending frequency.
  std::vector<int> perm(static_cast<std::size_t>(r));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return frame.frequencies[a] > frame.frequencies[b]; });
  Mat sorted(d, d);
  std::vector<double> fs;
  for (int j = 0; j < r; ++j) {
    sorted.col(j) = O.col(perm[j]);
    sorted.col(j + r) = O.col(perm[j] + r);
    fs.push_back(frame.frequencies[perm[j]]);
  }
  frame.frequencies = fs;
  frame.basis = root * sorted;

  Mat canonical = Mat::Zero(d, d);
  for (int j = 0; j < r; ++j) {
    canonical(j, j + r) = fs[j];
    canonical(j + r, j) = -fs[j];
  }
  const Mat transformed = frame.basis.transpose() * in.F * frame.basis;
  frame.residual = (transformed - canonical).cwiseAbs().maxCoeff() / fs.front();
  if (frame.residual > 1e-10)
    throw ComputationError("symplectic frame residual " + shortest(frame.residual) + " above tolerance");
  return frame;
}

double liouville_density(const FieldIntensity& in) {
  if (in.rank != in.dimension() || in.rank == 0) throw ComputationError("rank deficient intensity matrix");
  const double det_upper = in.metric.determinant();  // det g^{jk}
  const double product = in.frequency_product();
  const double value = product / std::sqrt(det_upper);
  // |det F|^{1/2} must agree: det(gF) = (f_1 ... f_r)^2.
  const double cross = std::sqrt(std::abs(in.F.determinant()));
  if (std::abs(cross - value) > 1e-8 * std::max(1.0, value))
    throw ComputationError("Liouville density cross-check failed: det(gF) != (f_1...f_r)^2");
  return value;
}

double Trajectory::max_potential_drift() const {
  double worst = 0.0;
  for (double v : potential) worst = std::max(worst, std::abs(v - potential.front()));
  return worst;
}

Trajectory drift_flow(const Scenario& s, const Vec& x0, double t_end, double dt) {
  require(s.constant_field(), "drift flow needs constant metric and field", "scenario");
  require(dt > 0.0 && std::isfinite(dt), "dt must be positive", "dt");
  require(t_end >= 0.0 && std::isfinite(t_end), "t_end must be nonnegative", "t_end");
  require(x0.size() == s.dimension, "x0 has wrong dimension", "x0");
  const Mat& slope = s.affine_gauge->slope;
  const Mat F = slope.transpose() - slope;
  Eigen::FullPivLU<Mat> lu(F);
  if (!lu.isInvertible()) throw ComputationError("intensity matrix F is singular");
  const Mat finv = lu.inverse();
  auto rhs = [&](const Vec& x) -> Vec { return finv * scalar_gradient(s, x); };

  const long steps = std::lround(t_end / dt);
  Trajectory traj;
  Vec x = x0;
  traj.t.push_back(0.0);
  traj.x.push_back(x);
  traj.potential.push_back(s.scalar_potential(x));
  for (long n = 0; n < steps; ++n) {
    const Vec k1 = rhs(x);
    const Vec k2 = rhs(x + 0.5 * dt * k1);
    const Vec k3 = rhs(x + 0.5 * dt * k2);
    const Vec k4 = rhs(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    traj.t.push_back(static_cast<double>(n + 1) * dt);
    traj.x.push_back(x);
    traj.potential.push_back(s.scalar_potential(x));
  }
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing", path);
  const std::size_t d = traj.x.empty() ? 0 : static_cast<std::size_t>(traj.x.front().size());
  out << "t";
  for (std::size_t a = 1; a <= d; ++a) out << ",x" << a;
  out << ",V\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    out << shortest(traj.t[i]);
    for (std::size_t a = 0; a < d; ++a) out << ',' << shortest(traj.x[i](static_cast<Eigen::Index>(a)));
    out << ',' << shortest(traj.potential[i]) << '\n';
  }
  if (!out) throw IoError("write failed for " + path, path);
}

}  // namespace magweyl

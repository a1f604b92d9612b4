#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/scenario_registry.hpp"
#include "core/spectrum.hpp"
#include "fixtures.hpp"

using namespace magweyl;

namespace {

Scenario flat(int d, double v0) {
  return fixtures::constant_field(
      Mat::Identity(d, d), Mat::Zero(d, d), [v0](const Vec&) { return v0; },
      [d](const Vec&) -> Vec { return Vec::Zero(d); });
}

// Closed-form spectrum of h^2 times the tensor second-difference Laplacian.
std::vector<double> laplacian_spectrum(const std::vector<int>& n, const std::vector<Boundary>& bc, double L,
                                       double h, double v0) {
  std::vector<std::vector<double>> axis;
  for (std::size_t a = 0; a < n.size(); ++a) {
    std::vector<double> e;
    if (bc[a] == Boundary::Dirichlet) {
      const double dx = L / (n[a] + 1);
      for (int k = 1; k <= n[a]; ++k) e.push_back((2.0 - 2.0 * std::cos(M_PI * k / (n[a] + 1))) / (dx * dx));
    } else {
      const double dx = L / n[a];
      for (int k = 0; k < n[a]; ++k) e.push_back((2.0 - 2.0 * std::cos(2.0 * M_PI * k / n[a])) / (dx * dx));
    }
    axis.push_back(e);
  }
  std::vector<double> out{0.0};
  for (const auto& e : axis) {
    std::vector<double> next;
    for (double a : out)
      for (double b : e) next.push_back(a + b);
    out = next;
  }
  for (double& v : out) v = h * h * v + v0;
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t count_le(const std::vector<double>& w, double tau) {
  return std::upper_bound(w.begin(), w.end(), tau) - w.begin();
}

}  // namespace

TEST_CASE("zero field Dirichlet operator matches the closed-form Laplacian spectrum") {
  const Scenario s = flat(2, -1.0);
  const Lattice lat{s.domain, {7, 9}, {Boundary::Dirichlet, Boundary::Dirichlet}};
  const DiscreteHamiltonian H = assemble(s, 5.0, 0.02, lat);
  CHECK(H.hermiticity_defect() == 0.0);
  const auto w = eigenvalues(H, EigenMethod::Dense);
  const auto ref = laplacian_spectrum(lat.n, lat.boundary, 1.0, 0.02, -1.0);
  REQUIRE(w.size() == ref.size());
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("zero field periodic and mixed boundaries") {
  const Scenario s = flat(2, 0.0);
  for (auto bc : {std::vector<Boundary>{Boundary::Periodic, Boundary::Periodic},
                  std::vector<Boundary>{Boundary::Dirichlet, Boundary::Periodic}}) {
    const Lattice lat{s.domain, {6, 8}, bc};
    const DiscreteHamiltonian H = assemble(s, 1.0, 0.05, lat);
    const auto w = eigenvalues(H, EigenMethod::Dense);
    const auto ref = laplacian_spectrum(lat.n, bc, 1.0, 0.05, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == doctest::Approx(ref[i]).epsilon(1e-9).scale(1.0));
    for (double tau : {0.0, 0.01, 0.1, 0.3, 1.0})
      for (auto m : {CountMethod::Dense, CountMethod::Inertia})
        CHECK(count_below(H, tau + 1e-9, m).count == count_le(ref, tau + 1e-9));
  }
}

TEST_CASE("one-dimensional Dirichlet spectrum") {
  const Scenario s = flat(1, 0.0);
  const Lattice lat{s.domain, {40}, {Boundary::Dirichlet}};
  const DiscreteHamiltonian H = assemble(s, 1.0, 0.1, lat);
  const auto w = eigenvalues(H);
  const double dx = 1.0 / 41;
  for (int k = 1; k <= 40; ++k)
    CHECK(w[k - 1] == doctest::Approx(0.01 * (2 - 2 * std::cos(M_PI * k / 41)) / (dx * dx)).epsilon(1e-10));
  // low modes approach (h pi k)^2
  CHECK(w[0] == doctest::Approx(0.01 * M_PI * M_PI).epsilon(1e-3));
}

TEST_CASE("gauge change leaves the Dirichlet spectrum unchanged") {
  const Scenario a = fixtures::plane(1.0, -1.0, 0.3);
  Mat slope = Mat::Zero(2, 2);
  slope(0, 1) = -1.0;
  const Scenario b = fixtures::constant_field(
      Mat::Identity(2, 2), slope, a.scalar_potential, [](const Vec&) -> Vec { return Vec{{0.0, 0.3}}; });
  const Lattice lat = Lattice::uniform(a.domain, 10, Boundary::Dirichlet);
  const auto wa = eigenvalues(assemble(a, 5.0, 0.05, lat), EigenMethod::Dense);
  const auto wb = eigenvalues(assemble(b, 5.0, 0.05, lat), EigenMethod::Dense);
  for (std::size_t i = 0; i < wa.size(); ++i) CHECK(wa[i] == doctest::Approx(wb[i]).epsilon(1e-10));
}

TEST_CASE("assembled operator is Hermitian with a curved gauge and general metric") {
  Scenario s = fixtures::plane(1.0, -1.0, 0.2);
  s.affine_gauge.reset();
  s.vector_potential = [](const Vec& x) -> Vec { return Vec{{-0.3 * x(1) * x(1), x(0) * (1.0 + 0.2 * x(1))}}; };
  Mat g(2, 2);
  g << 1.5, 0.4, 0.4, 1.0;
  s.metric = [g](const Vec&) { return g; };
  const Lattice lat = Lattice::uniform(s.domain, 8, Boundary::Dirichlet);
  const DiscreteHamiltonian H = assemble(s, 3.0, 0.1, lat);
  CHECK(H.hermiticity_defect() < 1e-14);
  const auto w = eigenvalues(H, EigenMethod::Dense);
  for (double tau : {-0.9, -0.5, 0.0, 0.5, 2.0})
    CHECK(count_below(H, tau, CountMethod::Inertia).count == count_le(w, tau));
}

TEST_CASE("dense, inertia and Bloch counts agree on the torus") {
  const Scenario s = make_scenario("const2d", {}, 8.0, 1.0 / 32);
  const Lattice lat = Lattice::uniform(s.domain, 24, Boundary::Periodic);
  const DiscreteHamiltonian H = assemble(s, 8.0, 1.0 / 32, lat);
  const auto sym = bloch_symmetry(H);
  REQUIRE(sym.has_value());
  const auto w = eigenvalues(H, EigenMethod::Dense);
  const auto wb = eigenvalues(H, EigenMethod::Bloch);
  REQUIRE(w.size() == wb.size());
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(wb[i] == doctest::Approx(w[i]).epsilon(1e-9).scale(1e-9));
  for (double tau : {-0.8, -0.5, -0.2, 0.0, 0.4}) {
    const auto expect = count_le(w, tau);
    CHECK(count_below(H, tau, CountMethod::Dense).count == expect);
    CHECK(count_below(H, tau, CountMethod::Inertia).count == expect);
    const CountResult b = count_below(H, tau, CountMethod::Bloch);
    CHECK(b.count == expect);
    CHECK(b.diagnostics.bloch_axis.has_value());
  }
}

TEST_CASE("inertia count agrees with dense counts on random potentials") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const double c1 = u(rng), c2 = u(rng), c3 = u(rng);
    Scenario s = fixtures::plane(2.0 * u(rng), 0.0, 0.0);
    s.scalar_potential = [=](const Vec& x) { return c1 * std::sin(3 * x(0)) + c2 * x(1) * x(1) + c3 * x(0) * x(1); };
    s.scalar_gradient = nullptr;
    const Lattice lat{s.domain, {7 + trial, 6}, {Boundary::Dirichlet, Boundary::Dirichlet}};
    const DiscreteHamiltonian H = assemble(s, 4.0, 0.08, lat);
    const auto w = eigenvalues(H, EigenMethod::Dense);
    for (int k = 0; k < 8; ++k) {
      const double tau = w.front() + (w.back() - w.front()) * (k + 0.5) / 8.0;
      CHECK(count_below(H, tau, CountMethod::Inertia).count == count_le(w, tau));
    }
  }
}

TEST_CASE("Landau levels on the flux-quantized torus") {
  // 12 flux quanta: each level holds 12 states. mu h = 0.25, levels -0.75, -0.25, 0.25.
  const double mu = 8.0, h = 1.0 / 32;
  const Scenario s = make_scenario("const2d", {}, mu, h);
  const Lattice lat = Lattice::uniform(s.domain, 48, Boundary::Periodic);
  const DiscreteHamiltonian H = assemble(s, mu, h, lat);
  CHECK(count_below(H, -0.5).count == 12);
  CHECK(count_below(H, 0.0).count == 24);
  const auto w = eigenvalues(H, EigenMethod::Auto, -0.5);
  REQUIRE(w.size() == 12);
  for (double v : w) CHECK(std::abs(v + 0.75) < 0.01);
}

TEST_CASE("flux quantization and aliasing are enforced") {
  const double mu = 8.0, h = 1.0 / 32;
  const Scenario s = make_scenario("const2d", {}, mu, h);
  const Lattice lat = Lattice::uniform(s.domain, 24, Boundary::Periodic);
  CHECK_THROWS_AS(assemble(s, mu * 1.1, h, lat), InvalidArgument);
  // 12 flux quanta on 4 x 4 sites: 3/4 of a quantum per plaquette
  const Lattice coarse = Lattice::uniform(s.domain, 4, Boundary::Periodic);
  CHECK_THROWS_AS(assemble(s, mu, h, coarse), ComputationError);
  CHECK_THROWS_AS(Lattice::uniform(s.domain, 3, Boundary::Periodic).validate(), InvalidArgument);
}

TEST_CASE("local trace with psi = 1 is the eigenvalue count") {
  const Scenario s = make_scenario("const2d", {}, 8.0, 1.0 / 32);
  const Lattice lat = Lattice::uniform(s.domain, 24, Boundary::Periodic);
  const DiscreteHamiltonian H = assemble(s, 8.0, 1.0 / 32, lat);
  const double c = static_cast<double>(count_below(H, -0.5).count);
  CHECK(local_trace(H, -0.5, CutoffFunction::one(2), EigenMethod::Dense) == doctest::Approx(c));
  CHECK(local_trace(H, -0.5, CutoffFunction::one(2), EigenMethod::Bloch) == doctest::Approx(c));
  // A cutoff in [0, 1] gives a value in [0, count].
  const Vec mid = 0.5 * (s.domain.lower + s.domain.upper);
  const Vec hw = 0.25 * (s.domain.upper - s.domain.lower);
  const double t = local_trace(H, -0.5, CutoffFunction::bump(mid, hw));
  CHECK(t > 0.0);
  CHECK(t < c);
}

TEST_CASE("dense budget") {
  const Scenario s = flat(2, 0.0);
  const Lattice lat = Lattice::uniform(s.domain, 20, Boundary::Dirichlet);
  const DiscreteHamiltonian H = assemble(s, 1.0, 0.1, lat);
  CHECK_THROWS_AS(count_below(H, 0.5, CountMethod::Dense, 100), BudgetExceeded);
  CHECK_NOTHROW(count_below(H, 0.5, CountMethod::Inertia, 100));
}

TEST_CASE("method names") {
  CHECK(parse_count_method("bloch") == CountMethod::Bloch);
  CHECK(count_method_name(CountMethod::Inertia) == "inertia");
  CHECK_THROWS_AS(parse_count_method("lanczos"), InvalidArgument);
  CHECK(parse_boundary("periodic") == Boundary::Periodic);
  CHECK_THROWS_AS(parse_boundary("robin"), InvalidArgument);
}

TEST_CASE("inertia count with tau on a degenerate cluster") {
  const double mu = 8.0, h = 1.0 / 32;
  const Scenario s = make_scenario("const2d", {}, mu, h);
  const Lattice lat = Lattice::uniform(s.domain, 32, Boundary::Periodic);
  const DiscreteHamiltonian H = assemble(s, mu, h, lat);
  const auto w = eigenvalues(H, EigenMethod::Dense);
  for (std::size_t k : {std::size_t{200}, std::size_t{230}, std::size_t{500}}) {
    const double tau = w[k];
    std::int64_t below = count_le(w, tau - 1e-6), through = count_le(w, tau + 1e-6);
    const CountResult r = count_below(H, tau, CountMethod::Inertia);
    CHECK(r.count >= below);
    CHECK(r.count <= through);
  }
}

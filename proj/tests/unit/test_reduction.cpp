#include <doctest.h>

#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/reduction.hpp"
#include "core/scenario_registry.hpp"
#include "core/spectrum.hpp"
#include "fixtures.hpp"

using namespace magweyl;

namespace {

Mat omega(int d) {
  Mat J = Mat::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d) = Mat::Identity(d, d);
  J.bottomLeftCorner(d, d) = -Mat::Identity(d, d);
  return J;
}

}  // namespace

TEST_CASE("reduction of const4d") {
  const Scenario s = make_scenario("const4d");
  const Reduction red = reduce_constant(s, 3.0);
  const auto fi = intensity_matrix(s, 0.5 * (s.domain.lower + s.domain.upper));
  REQUIRE(red.reduced.frequencies.size() == 2);
  for (int j = 0; j < 2; ++j) CHECK(red.reduced.frequencies[j] == doctest::Approx(fi.frequencies[j]));
  CHECK(red.pipeline.steps.size() == 5);
  CHECK(red.pipeline.symplectic_residual < 1e-12);
  CHECK(red.pipeline.symbol_residual < 1e-10);
  CHECK(red.pipeline.symbol_samples == kSymbolSamples);
  // The composite is symplectic, checked independently.
  const Mat& M = red.pipeline.composite;
  const Mat W = omega(4);
  CHECK((M.transpose() * W * M - W).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, M.cwiseAbs().maxCoeff()));
  CHECK(red.reduced.liouville == doctest::Approx(liouville_density(fi)));
}

TEST_CASE("shear entries are 1/f_j") {
  const Scenario s = make_scenario("const4d");
  const Reduction red = reduce_constant(s, 1.0);
  const auto& f = red.reduced.frequencies;
  const Mat& K = red.pipeline.step4_K;
  for (int j = 0; j < 2; ++j) CHECK(K(j, j + 2) == doctest::Approx(1.0 / f[j]));
}

TEST_CASE("reduced symbol matches at random phase points") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Scenario s = make_scenario("const4d");
  const double mu = 2.5;
  const Reduction red = reduce_constant(s, mu);
  const auto& f = red.reduced.frequencies;
  for (int k = 0; k < 20; ++k) {
    Vec z(8);
    for (int i = 0; i < 8; ++i) z(i) = u(rng);
    const Vec zo = red.pipeline.composite * z + red.pipeline.composite_shift;
    // In reduced coordinates (w, pi) the symbol is sum f_j (pi_j^2 + mu^2 w_j^2)
    // over the first r position/momentum pairs.
    double expected = 0.0;
    for (int j = 0; j < 2; ++j) expected += f[j] * (z(4 + j) * z(4 + j) + mu * mu * z(j) * z(j));
    CHECK(magnetic_symbol(s, mu, zo) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("reduction needs constant data and full rank") {
  Scenario s = fixtures::plane(1.0, -1.0, 0.0);
  s.affine_gauge.reset();
  CHECK_THROWS_AS(reduce_constant(s, 1.0), InvalidArgument);
  const Scenario z = fixtures::plane(0.0, -1.0, 0.0);
  CHECK_THROWS_AS(reduce_constant(z, 1.0), ComputationError);
  CHECK_THROWS_AS(reduce_constant(make_scenario("const4d"), 0.0), InvalidArgument);
}

TEST_CASE("isospectral check on the flux-quantized torus") {
  const double mu = 8.0, h = 1.0 / 32;
  const Scenario s = make_scenario("const2d", {}, mu, h);
  const Reduction red = reduce_constant(s, mu);
  const Lattice lat = Lattice::uniform(s.domain, 48, Boundary::Periodic);
  const DiscreteHamiltonian H = assemble(s, mu, h, lat);
  const IsospectralReport rep = verify_reduction_isospectral(red.reduced, H, 3);
  CHECK(rep.degeneracy == doctest::Approx(12.0));
  REQUIRE(rep.levels.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(rep.levels[i].multiplicity == 12);
    CHECK(rep.levels[i].predicted == doctest::Approx(-1.0 + (2 * i + 1) * 0.25));
  }
  // Deviations grow with the level index like the second-order lattice error.
  CHECK(rep.levels[0].deviation < rep.levels[1].deviation);
  CHECK(rep.levels[1].deviation < rep.levels[2].deviation);
  CHECK(rep.max_deviation < 0.02);
}

TEST_CASE("isospectral check refuses a non-constant potential") {
  const Scenario s = fixtures::plane(1.0, -1.0, 0.5);
  const Reduction red = reduce_constant(s, 2.0);
  const Lattice lat = Lattice::uniform(s.domain, 8, Boundary::Dirichlet);
  CHECK_THROWS_AS(verify_reduction_isospectral(red.reduced, assemble(s, 2.0, 0.1, lat), 2), InvalidArgument);
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "core/errors.hpp"
#include "core/resonance.hpp"
#include "fixtures.hpp"

using namespace magweyl;

namespace {

// Independent scan: every integer vector in the box [-m, m]^r, canonical sign.
std::set<std::vector<int>> brute_relations(const std::vector<double>& f, int max_order, double tol) {
  std::set<std::vector<int>> out;
  const int r = static_cast<int>(f.size());
  std::vector<int> g(static_cast<std::size_t>(r), -max_order);
  const double fmax = *std::max_element(f.begin(), f.end());
  while (true) {
    int order = 0;
    double sum = 0.0;
    for (int j = 0; j < r; ++j) {
      order += std::abs(g[j]);
      sum += g[j] * f[j];
    }
    int first = 0;
    for (int v : g)
      if (v != 0) {
        first = v;
        break;
      }
    if (order >= 2 && order <= max_order && first > 0 && std::abs(sum) <= tol * fmax) out.insert(g);
    int j = 0;
    while (j < r && g[j] == max_order) g[j++] = -max_order;
    if (j == r) break;
    ++g[j];
  }
  return out;
}

Groups brute_third_order(const std::vector<double>& f, double eps) {
  const int r = static_cast<int>(f.size());
  const double fmax = *std::max_element(f.begin(), f.end());
  std::vector<int> label(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) label[i] = i;
  auto merge = [&](int a, int b) {
    const int la = label[a], lb = label[b];
    if (la == lb) return false;
    const int keep = std::min(la, lb), drop = std::max(la, lb);
    for (int& l : label)
      if (l == drop) l = keep;
    return true;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        if (std::abs(f[i] - f[j]) <= eps * fmax) changed |= merge(i, j);
        for (int k = 0; k < r; ++k)
          if (std::abs(f[i] - f[j] - f[k]) <= eps * fmax) changed |= merge(i, j) | merge(i, k);
      }
  }
  Groups out;
  for (int l = 0; l < r; ++l) {
    std::vector<int> g;
    for (int i = 0; i < r; ++i)
      if (label[i] == l) g.push_back(i);
    if (!g.empty()) out.push_back(g);
  }
  return out;
}

}  // namespace

TEST_CASE("resonances of f=(1,2) up to order 3") {
  const auto rel = enumerate_resonances({1.0, 2.0}, 3);
  REQUIRE(rel.size() == 1);
  CHECK(rel[0].gamma == std::vector<int>{2, -1});
  CHECK(rel[0].order == 3);
  CHECK(rel[0].residual == 0.0);
}

TEST_CASE("no resonances for an irrational ratio") {
  CHECK(enumerate_resonances({1.0, M_PI}, 6, 1e-9).empty());
}

TEST_CASE("equal frequencies give the order-2 relation") {
  const auto rel = enumerate_resonances({1.0, 1.0}, 2);
  REQUIRE(rel.size() == 1);
  CHECK(rel[0].gamma == std::vector<int>{1, -1});
  CHECK(rel[0].order == 2);
}

TEST_CASE("order guard") {
  CHECK_THROWS_AS(enumerate_resonances({1.0, 2.0}, 9), InvalidArgument);
  CHECK_THROWS_AS(enumerate_resonances({1.0, -2.0}, 3), InvalidArgument);
}

TEST_CASE("enumeration is sound and complete against a box scan") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> small(1, 4);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int r = 2 + trial % 2;
    std::vector<double> f;
    for (int j = 0; j < r; ++j) f.push_back(trial % 3 == 0 ? u(rng) : small(rng) * 0.5);
    const int max_order = 4;
    const auto rel = enumerate_resonances(f, max_order, 1e-9);
    const auto brute = brute_relations(f, max_order, 1e-9);
    std::set<std::vector<int>> got;
    for (const auto& x : rel) {
      double sum = 0.0;
      for (int j = 0; j < r; ++j) sum += x.gamma[j] * f[j];
      CHECK(std::abs(sum) <= 1e-9 * *std::max_element(f.begin(), f.end()));
      got.insert(x.gamma);
    }
    CHECK(got == brute);
  }
}

TEST_CASE("second-order partitions") {
  CHECK(partition_second_order({1.0, 1.0, 2.0}, 1e-6) == Groups{{0, 1}, {2}});
  CHECK(partition_second_order({1.0, 2.0, 3.0}, 1e-6) == Groups{{0}, {1}, {2}});
  const double eps = 1e-3;
  // Within tolerance: |f1 - f2| = eps/2 * max f.
  CHECK(partition_second_order({1.0, 1.0 + eps / 2 * 2.0, 2.0}, eps) == Groups{{0, 1}, {2}});
}

TEST_CASE("exact partitions at eps=0 are equality classes") {
  CHECK(partition_second_order({2.0, 1.0, 2.0, 3.0, 1.0}, 0.0) == Groups{{0, 2}, {1, 4}, {3}});
}

TEST_CASE("third-order partitions") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(partition_third_order(a, partition_second_order(a, 1e-6), 1e-6) == Groups{{0, 1, 2}});
  const std::vector<double> b{1.0, 2.0};
  CHECK(partition_third_order(b, partition_second_order(b, 1e-6), 1e-6) == Groups{{0, 1}});
  // 2 = 1 + 1 joins the first two; 5 has no third-order relation.
  const std::vector<double> c{1.0, 2.0, 5.0};
  CHECK(partition_third_order(c, partition_second_order(c, 1e-6), 1e-6) == Groups{{0, 1}, {2}});
  const std::vector<double> d{1.0, M_PI, M_PI * M_PI};
  CHECK(partition_third_order(d, partition_second_order(d, 1e-9), 1e-9) == Groups{{0}, {1}, {2}});
}

TEST_CASE("partitions refine and match a brute closure on random inputs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int r = 1 + trial % 4;
    std::vector<double> f;
    for (int j = 0; j < r; ++j) f.push_back(u(rng));
    const double eps = 0.05;
    const Groups m = partition_second_order(f, eps);
    const Groups n = partition_third_order(f, m, eps);
    CHECK(is_partition(m, r));
    CHECK(is_partition(n, r));
    CHECK(refines(m, n));
    CHECK(n == brute_third_order(f, eps));
  }
}

TEST_CASE("gap condition on a constant potential") {
  const Scenario s = fixtures::plane(1.0, -1.0, 0.0);
  const auto grid = sample_grid(s.domain, 3);
  // mu h = 0.4: levels 0.4 - 1 = -0.6, 1.2 - 1 = 0.2
  const ConditionReport a = check_gap_condition(s, 4.0, 0.1, 0.0, grid);
  CHECK(a.satisfied);
  CHECK(a.margin == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(a.witness_alpha == std::vector<int>{1});
  // mu h = 1/3: 3/3 - 1 = 0 is an exact hit
  const ConditionReport b = check_gap_condition(s, 1.0, 1.0 / 3.0, 0.0, grid);
  CHECK_FALSE(b.satisfied);
  CHECK(b.margin == 0.0);
}

TEST_CASE("gap condition with a single level below the threshold") {
  // mu h = 1.5 >= |min V| / f + eps1: only the ground level matters.
  const Scenario s = fixtures::plane(1.0, -1.0, 0.2);
  const auto grid = sample_grid(s.domain, 4);
  const ConditionReport r = check_gap_condition(s, 1.5, 1.0, 0.1, grid);
  double minV = 1e9;
  for (const Vec& x : grid) minV = std::min(minV, s.scalar_potential(x));
  CHECK(r.satisfied);
  CHECK(r.margin == doctest::Approx(1.5 + minV - 0.1).epsilon(1e-12));
}

TEST_CASE("gap condition with eps1 = 0 holds away from exact hits") {
  const Scenario s = fixtures::plane(1.0, -1.0, 0.3);
  const auto grid = sample_grid(s.domain, 5);
  const ConditionReport r = check_gap_condition(s, 1.0, 0.37, 0.0, grid);
  CHECK(r.satisfied);
}

TEST_CASE("weak microhyperbolicity") {
  const Scenario a = fixtures::plane(1.0, 0.0, 1.0);
  const auto grid = sample_grid(a.domain, 4);
  MicrohypParams p;
  p.eps1 = 0.5;
  const ConditionReport r = check_microhyp_constant(a, p, grid);
  CHECK(r.satisfied);
  CHECK(r.margin == doctest::Approx(0.5));
  const Scenario b = fixtures::plane(1.0, -1.0, 0.0);
  CHECK_FALSE(check_microhyp_constant(b, p, grid).satisfied);
}

TEST_CASE("strong microhyperbolicity adds the level distance") {
  const Scenario s = fixtures::plane(1.0, -1.0, 0.2);
  const auto grid = sample_grid(s.domain, 6);
  MicrohypParams p;
  p.variant = MicrohypVariant::Strong;
  p.mu = 3.5;
  p.h = 0.1;
  p.eps1 = 0.1;
  const ConditionReport r = check_microhyp_constant(s, p, grid);
  CHECK(r.satisfied);
  // Direct evaluation of both terms on the grid.
  double worst = 1e9;
  for (const Vec& x : grid) {
    const double V = s.scalar_potential(x);
    double dist = 1e9;
    for (int a = 0; a < 20; ++a) dist = std::min(dist, std::abs((2 * a + 1) * 0.35 + V));
    worst = std::min(worst, dist + 0.2);
  }
  CHECK(r.margin == doctest::Approx(worst - 0.1).epsilon(1e-12));
  p.mu = 0.0;
  CHECK_THROWS_AS(check_microhyp_constant(s, p, grid), InvalidArgument);
}

TEST_CASE("superstrong variant needs alpha_bar and differentiates V / E") {
  const Scenario s = fixtures::plane(1.0, -1.0, 0.3);
  const auto grid = sample_grid(s.domain, 3);
  MicrohypParams p;
  p.variant = MicrohypVariant::Superstrong;
  CHECK_THROWS_AS(check_microhyp_constant(s, p, grid), InvalidArgument);
  p.alpha_bar = std::vector<int>{1};
  const ConditionReport r = check_microhyp_constant(s, p, grid);
  // |grad (V / 3f)| = 0.3 / 3
  CHECK(r.margin == doctest::Approx(0.1).epsilon(1e-8));
}

TEST_CASE("sampled general check reduces to the weak condition for constant f") {
  GeneralCheckParams p;
  p.eps1 = 0.0;
  {
    const Scenario s = fixtures::plane(1.0, -1.0, 0.3);
    const auto grid = sample_grid(s.domain, 4);
    const ConditionReport g = check_microhyp_general(s, p, grid);
    MicrohypParams w;
    const ConditionReport c = check_microhyp_constant(s, w, grid);
    CHECK(g.satisfied);
    CHECK(c.satisfied);
    CHECK(g.margin > 0.0);
    CHECK(condition_name(g.id) == "general_sampled");
  }
  {
    const Scenario s = fixtures::plane(1.0, -1.0, 0.0);
    const auto grid = sample_grid(s.domain, 4);
    CHECK_FALSE(check_microhyp_general(s, p, grid).satisfied);
    MicrohypParams w;
    CHECK_FALSE(check_microhyp_constant(s, w, grid).satisfied);
  }
}

TEST_CASE("sampled general check matches the closed form for r = 1") {
  // A = (0, x1 (1 + 0.1 x2)) gives f = 1 + 0.1 x2; V = -1.
  Scenario s = fixtures::plane(1.0, -1.0, 0.0);
  s.affine_gauge.reset();
  s.vector_potential = [](const Vec& x) -> Vec { return Vec{{0.0, x(0) * (1.0 + 0.1 * x(1))}}; };
  s.potential_jacobian = [](const Vec& x) -> Mat {
    Mat J = Mat::Zero(2, 2);
    J(1, 0) = 1.0 + 0.1 * x(1);
    J(1, 1) = 0.1 * x(0);
    return J;
  };
  const auto grid = sample_grid(s.domain, 5);
  GeneralCheckParams p;
  p.eps = 0.05;
  const ConditionReport r = check_microhyp_general(s, p, grid);
  // grad(f / V) = (0, -0.1); the best direction is l = (0, -1) and the
  // quadratic form per unit energy is 0.1 / f, minimized at the lowest energy
  // 1 - eps and the largest f on the grid.
  double fmax = 0.0;
  for (const Vec& x : grid) fmax = std::max(fmax, 1.0 + 0.1 * x(1));
  const double expected = (1.0 - p.eps) * 0.1 / fmax;
  CHECK(r.satisfied);
  CHECK(r.margin == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("empty grids are rejected") {
  const Scenario s = fixtures::plane(1.0, -1.0, 0.0);
  CHECK_THROWS_AS(check_gap_condition(s, 1.0, 0.5, 0.0, {}), InvalidArgument);
  CHECK_THROWS_AS(check_microhyp_constant(s, MicrohypParams{}, {}), InvalidArgument);
}

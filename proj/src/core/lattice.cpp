#include "core/lattice.hpp"

#include "core/errors.hpp"

namespace magweyl {

Boundary parse_boundary(const std::string& name) {
  if (name == "dirichlet") return Boundary::Dirichlet;
  if (name == "periodic") return Boundary::Periodic;
  throw InvalidArgument("unknown boundary condition '" + name + "'", "bc");
}

std::string boundary_name(Boundary b) { return b == Boundary::Periodic ? "periodic" : "dirichlet"; }

Lattice Lattice::uniform(const Box& domain, int n, Boundary b) {
  Lattice l;
  l.domain = domain;
  l.n.assign(static_cast<std::size_t>(domain.dimension()), n);
  l.boundary.assign(static_cast<std::size_t>(domain.dimension()), b);
  return l;
}

std::size_t Lattice::size() const {
  std::size_t s = 1;
  for (int v : n) s *= static_cast<std::size_t>(v);
  return s;
}

double Lattice::spacing(int axis) const {
  const double L = domain.upper(axis) - domain.lower(axis);
  return boundary[axis] == Boundary::Periodic ? L / n[axis] : L / (n[axis] + 1);
}

double Lattice::coordinate(int axis, int i) const {
  const double off = boundary[axis] == Boundary::Periodic ? 0.0 : 1.0;
  return domain.lower(axis) + (i + off) * spacing(axis);
}

Vec Lattice::position(const std::vector<int>& idx) const {
  Vec x(dimension());
  for (int a = 0; a < dimension(); ++a) x(a) = coordinate(a, idx[a]);
  return x;
}

std::vector<int> Lattice::unravel(std::size_t site) const {
  std::vector<int> idx(n.size());
  for (std::size_t a = 0; a < n.size(); ++a) {
    idx[a] = static_cast<int>(site % static_cast<std::size_t>(n[a]));
    site /= static_cast<std::size_t>(n[a]);
  }
  return idx;
}

std::size_t Lattice::ravel(const std::vector<int>& idx) const {
  std::size_t site = 0;
  for (int a = dimension() - 1; a >= 0; --a) site = site * static_cast<std::size_t>(n[a]) + idx[a];
  return site;
}

double Lattice::cell_measure() const {
  double m = 1.0;
  for (int a = 0; a < dimension(); ++a) m *= spacing(a);
  return m;
}

void Lattice::validate() const {
  require(domain.dimension() == dimension() && boundary.size() == n.size(),
          "lattice dimension mismatch", "lattice");
  for (int a = 0; a < dimension(); ++a) {
    require(n[a] >= 4, "lattice needs at least 4 points per axis", "n");
    require(domain.upper(a) > domain.lower(a), "lattice extent must be positive", "lattice");
  }
}

}  // namespace magweyl

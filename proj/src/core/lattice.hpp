#pragma once

#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace magweyl {

enum class Boundary { Dirichlet, Periodic };

Boundary parse_boundary(const std::string& name);
std::string boundary_name(Boundary b);

// Tensor grid over a box. Dirichlet axes carry n interior points at spacing
// L/(n+1); periodic axes carry n points at spacing L/n starting at the lower
// bound. Site index is lexicographic with axis 0 fastest.
struct Lattice {
  Box domain;
  std::vector<int> n;
  std::vector<Boundary> boundary;

  static Lattice uniform(const Box& domain, int n, Boundary b);

  int dimension() const { return static_cast<int>(n.size()); }
  std::size_t size() const;
  double spacing(int axis) const;
  double coordinate(int axis, int i) const;  // i may lie outside [0, n) for virtual sites
  Vec position(const std::vector<int>& idx) const;
  std::vector<int> unravel(std::size_t site) const;
  std::size_t ravel(const std::vector<int>& idx) const;
  double cell_measure() const;

  void validate() const;  // n_j >= 4, matching dimensions
};

}  // namespace magweyl

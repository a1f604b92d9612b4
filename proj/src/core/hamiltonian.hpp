#pragma once

#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/lattice.hpp"

namespace magweyl {

struct SparseEntry {
  std::size_t col;
  cplx value;
};

// Lattice magnetic Schrodinger operator -h^2 sum nabla_a g^{ab} nabla_b + V with
// nabla_a = d_a - i (mu/h) V_a, realized through Peierls link factors.
struct DiscreteHamiltonian {
  Scenario scenario;
  Lattice lattice;
  double mu = 0.0;
  double h = 1.0;
  std::vector<std::vector<SparseEntry>> rows;  // both triangles, columns ascending
  std::vector<std::string> warnings;

  std::size_t size() const { return rows.size(); }
  std::size_t nonzeros() const;
  cplx entry(std::size_t i, std::size_t j) const;
  double norm_bound() const;              // max absolute row sum
  double hermiticity_defect() const;      // max |H_ij - conj(H_ji)|
  std::vector<cplx> dense() const;        // column-major
};

// Throws InvalidArgument on a flux-quantization violation or a vector potential
// that is not periodic up to gauge along a periodic axis, and ComputationError
// when the flux per plaquette reaches pi (aliasing).
DiscreteHamiltonian assemble(const Scenario& s, double mu, double h, const Lattice& lattice);

}  // namespace magweyl

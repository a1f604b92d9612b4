#pragma once

#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/hamiltonian.hpp"

namespace magweyl {

// Phase space points are z = (x_1..x_d, xi_1..xi_d). Every step maps new
// coordinates to old ones: z_old = M z_new + shift.
struct AffineStep {
  std::string name;
  Mat matrix;  // 2d x 2d
  Vec shift;   // 2d
};

struct MetaplecticPipeline {
  Mat step1_Q;             // x = Q y, xi = Q^{-T} eta
  Mat step2_S;             // eta_old = eta + mu (S y + s0)
  Vec step2_s0;
  std::vector<int> step3_fourier;  // 0-based indices of the Fourier-transformed coordinates
  Mat step4_K;             // shear z' = u' + K u'' with K_{j,j+r} = 1/f_j
  Vec step5_scale;         // u_j = w_j / sqrt(f_j), nu_j = sqrt(f_j) pi_j
  std::vector<AffineStep> steps;
  Mat composite;           // product of the step matrices
  Vec composite_shift;
  double symplectic_residual = 0.0;  // |J^T Omega J - Omega|_max / |J|_max^2
  double symbol_residual = 0.0;      // max relative symbol mismatch over the samples
  int symbol_samples = 0;
};

struct ReducedForm {
  std::vector<double> frequencies;
  double mu = 1.0;
  // x_original = substitution * z_reduced + substitution_shift; the reduced
  // potential is V evaluated there.
  Mat substitution;
  Vec substitution_shift;
  std::string oscillator_part;
  // Constant-coefficient data kept for spectral comparison.
  double liouville = 0.0;  // f_1..f_r sqrt(g)
  double volume = 0.0;     // domain volume
  double potential_constant = 0.0;
  bool constant_potential = false;
};

struct Reduction {
  MetaplecticPipeline pipeline;
  ReducedForm reduced;
};

inline constexpr int kSymbolSamples = 100;

// Builds the five-step pipeline for a constant field and checks it at
// kSymbolSamples deterministic phase points in the unit ball.
Reduction reduce_constant(const Scenario& s, double mu);

// The quadratic symbol sum g^{jk}(xi_j - mu V_j)(xi_k - mu V_k) at z.
double magnetic_symbol(const Scenario& s, double mu, const Vec& z);

struct LevelComparison {
  double predicted = 0.0;
  int multiplicity = 0;   // predicted number of eigenvalues in the cluster
  double mean = 0.0;
  double width = 0.0;     // max - min within the cluster
  double deviation = 0.0; // max |lambda - predicted|
  std::vector<int> alpha; // first multi-index at this energy
};

struct IsospectralReport {
  std::vector<LevelComparison> levels;
  double degeneracy = 0.0;  // eigenvalues per Landau level, (2 pi)^{-r} (mu/h)^r f_1..f_r sqrt(g) vol
  double min_gap = 0.0;
  double max_deviation = 0.0;
  double spacing = 0.0;     // largest lattice spacing
};

// Compares the k lowest distinct clusters of H with E_alpha mu h + V.
IsospectralReport verify_reduction_isospectral(const ReducedForm& reduced, const DiscreteHamiltonian& H, int k);

}  // namespace magweyl

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/hamiltonian.hpp"
#include "core/weyl.hpp"

namespace magweyl {

inline constexpr std::size_t kDenseBudget = 8192;

enum class CountMethod { Dense, Inertia, Bloch, Auto };
enum class EigenMethod { Dense, Bloch, Auto };

CountMethod parse_count_method(const std::string& name);
std::string count_method_name(CountMethod m);
EigenMethod parse_eigen_method(const std::string& name);

struct CountDiagnostics {
  // dense / bloch
  std::optional<double> min_eigenvalue;
  std::optional<double> max_eigenvalue;
  std::optional<double> distance_to_tau;  // nearest eigenvalue to tau
  // inertia
  std::optional<double> min_abs_pivot;
  std::optional<double> max_abs_pivot;
  std::optional<double> pivot_growth;  // element growth of the factorization
  std::optional<std::int64_t> negative_pivots;
  std::optional<std::size_t> envelope;
  std::optional<int> bloch_axis;
  std::optional<int> bloch_stride;
};

struct CountResult {
  std::int64_t count = 0;  // #{lambda <= tau}
  CountMethod method = CountMethod::Dense;
  CountDiagnostics diagnostics;
  double jitter = 0.0;  // shift applied to tau after a factorization breakdown
};

// Auto picks Bloch when the operator is translation invariant along a periodic
// axis and inertia otherwise.
CountResult count_below(const DiscreteHamiltonian& H, double tau, CountMethod method = CountMethod::Auto,
                        std::size_t dense_budget = kDenseBudget);

struct BlochSymmetry {
  int axis = 0;
  int stride = 1;  // H commutes with the shift by `stride` sites along `axis`
};

// Translation symmetry along a periodic axis with the smallest block size
// (sites per slice times stride), if any proper one exists.
std::optional<BlochSymmetry> bloch_symmetry(const DiscreteHamiltonian& H);

// Ascending eigenvalues; with `upper` only those <= upper are returned.
std::vector<double> eigenvalues(const DiscreteHamiltonian& H, EigenMethod method = EigenMethod::Auto,
                                std::optional<double> upper = std::nullopt,
                                std::size_t dense_budget = kDenseBudget);

// sum over lambda_k <= tau of sum_n psi(x_n) |u_k(n)|^2 with l2-normalized u_k.
double local_trace(const DiscreteHamiltonian& H, double tau, const CutoffFunction& psi,
                   EigenMethod method = EigenMethod::Auto, std::size_t dense_budget = kDenseBudget);

}  // namespace magweyl

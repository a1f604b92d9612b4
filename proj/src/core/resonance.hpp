#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace magweyl {

struct ResonanceRelation {
  std::vector<int> gamma;  // lexicographically positive representative of +-gamma
  int order = 0;           // sum |gamma_j|
  double residual = 0.0;   // |sum gamma_j f_j|
};

inline constexpr int kMaxResonanceOrder = 8;

// All gamma in Z^r with 2 <= |gamma| <= max_order and |sum gamma_j f_j| <= tol * max f.
// Sorted by order, then lexicographically descending.
std::vector<ResonanceRelation> enumerate_resonances(const std::vector<double>& f, int max_order,
                                                    double tol = 1e-9);

using Groups = std::vector<std::vector<int>>;  // 0-based indices, each group sorted, groups sorted

// Union-find closure of |f_i - f_j| <= eps * max f.
Groups partition_second_order(const std::vector<double>& f, double eps);

// Coarsens `groups_m` until |f_i - f_j - f_k| <= eps * max f (j == k allowed)
// forces i, j, k into one group.
Groups partition_third_order(const std::vector<double>& f, const Groups& groups_m, double eps);

bool is_partition(const Groups& groups, int r);
bool refines(const Groups& fine, const Groups& coarse);

enum class ConditionId { MicrohypWeak, MicrohypStrong, MicrohypSuperstrong, EllipticityGap, General };

std::string condition_name(ConditionId id);

struct ConditionReport {
  ConditionId id = ConditionId::MicrohypWeak;
  bool satisfied = false;
  double margin = 0.0;           // worst-case slack; >= 0 iff satisfied (exact level hits excepted)
  Vec witness;                   // point where the margin is attained
  std::vector<int> witness_alpha;  // level multi-index at the witness, when relevant
  std::string note;
};

// min over grid and alpha of |E_alpha mu h + V(x) - tau| against eps1.
ConditionReport check_gap_condition(const Scenario& s, double mu, double h, double eps1,
                                    const std::vector<Vec>& grid, double tau = 0.0);

enum class MicrohypVariant { Weak, Strong, Superstrong };

struct MicrohypParams {
  MicrohypVariant variant = MicrohypVariant::Weak;
  double mu = 0.0;  // strong: needs mu h
  double h = 0.0;
  double eps1 = 0.0;
  double tau = 0.0;
  std::optional<std::vector<int>> alpha_bar;  // superstrong only
};

ConditionReport check_microhyp_constant(const Scenario& s, const MicrohypParams& params,
                                        const std::vector<Vec>& grid);

struct GeneralCheckParams {
  double eps0 = 0.05;    // grouping tolerance for the partitions
  double eps = 0.05;     // energy window |sum tau_n + V| <= eps
  double eps1 = 0.0;
  int direction_samples = 64;  // per coordinate 2-plane
  int level_samples = 16;      // per group
  int zeta_samples = 128;      // per torus
};

// Sampled certificate (not a proof) for the block-scalar model a_jk = f_j delta_jk:
// max over sampled unit l of min over sampled (tau, zeta) of
// sum_j l . grad(f_j / V) |zeta_j|^2 subject to sum_{j in n} f_j |zeta_j|^2 = tau_n.
ConditionReport check_microhyp_general(const Scenario& s, const GeneralCheckParams& params,
                                       const std::vector<Vec>& grid);

}  // namespace magweyl

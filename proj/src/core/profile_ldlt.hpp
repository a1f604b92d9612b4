#pragma once

#include <cstdint>
#include <vector>

namespace magweyl {

struct LdltInertia {
  std::int64_t negative = 0;
  std::int64_t positive = 0;
  double min_abs_pivot = 0.0;
  double max_abs_pivot = 0.0;
  bool breakdown = false;  // a pivot fell below the threshold; counts are unreliable
  double growth = 0.0;     // max |(L D)_ij| and |D_i| over max |A_ij|
};

// Real symmetric matrix in envelope (profile) storage: row i holds columns
// first[i] .. i of the lower triangle.
class ProfileMatrix {
 public:
  explicit ProfileMatrix(std::vector<std::size_t> first);

  std::size_t size() const { return first_.size(); }
  std::size_t envelope() const { return values_.size(); }
  std::size_t first(std::size_t i) const { return first_[i]; }
  double& at(std::size_t i, std::size_t j);  // j in [first(i), i]
  double get(std::size_t i, std::size_t j) const;

 private:
  friend LdltInertia ldlt_inertia(ProfileMatrix a, double breakdown_threshold);
  std::vector<std::size_t> first_;
  std::vector<std::size_t> offset_;  // start of row i in values_
  std::vector<double> values_;
};

// LDL^T without pivoting on the envelope; Sylvester inertia from the signs of D.
LdltInertia ldlt_inertia(ProfileMatrix a, double breakdown_threshold);

}  // namespace magweyl

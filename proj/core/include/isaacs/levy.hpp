#pragma once

#include <vector>

#include "isaacs/expr.hpp"

namespace isaacs {

/// Finite-activity jump specification: finitely many atom sizes e_i with
/// intensities lambda_i, plus the nonlocal weight l sampled at the atoms.
struct LevyModel {
  std::vector<double> atoms;        // distinct, nonzero
  std::vector<double> intensities;  // lambda_i > 0
  std::vector<double> l_values;     // l(e_i), 0 <= l(e_i) <= C*min(1,|e_i|)
  double C = 1.0;
  double total_intensity = 0.0;

  int n_atoms() const { return static_cast<int>(atoms.size()); }
  bool empty() const { return atoms.empty(); }

  /// sum_i value_i * l(e_i) * lambda_i, the discrete nonlocal pairing.
  double weighted_sum(const std::vector<double>& values) const;
};

/// Validates atoms/intensities and evaluates the weight expression at every
/// atom, enforcing 0 <= l(e) <= C*min(1,|e|) pointwise. Violations report
/// the offending atom. An empty atom list yields the jump-free model.
LevyModel discretize_levy(const std::vector<double>& atoms,
                          const std::vector<double>& intensities, const Expression& l_expr,
                          double C);

}  // namespace isaacs

#include "isaacs/levy.hpp"

#include <cmath>
#include <string>

namespace isaacs {

double LevyModel::weighted_sum(const std::vector<double>& values) const {
  double acc = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    acc += values[i] * l_values[i] * intensities[i];
  return acc;
}

LevyModel discretize_levy(const std::vector<double>& atoms,
                          const std::vector<double>& intensities, const Expression& l_expr,
                          double C) {
  if (atoms.size() != intensities.size())
    throw ConfigError("jump model: atom and intensity lists differ in length");
  if (C < 0) throw ConfigError("jump model: weight bound constant C must be nonnegative");

  LevyModel m;
  m.C = C;
  m.atoms = atoms;
  m.intensities = intensities;

  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i] == 0.0)
      throw ConfigError("jump model: atom " + std::to_string(i) + " is zero");
    for (std::size_t j = 0; j < i; ++j)
      if (atoms[j] == atoms[i])
        throw ConfigError("jump model: atom " + std::to_string(i) + " duplicates atom " +
                          std::to_string(j) + " (value " + std::to_string(atoms[i]) + ")");
    if (!(intensities[i] > 0))
      throw ConfigError("jump model: intensity for atom " + std::to_string(i) +
                        " must be positive");
  }

  m.l_values.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    Env env;
    env.e = atoms[i];
    double v = l_expr.empty() ? 0.0 : l_expr.eval(env);
    double cap = C * std::fmin(1.0, std::fabs(atoms[i]));
    if (v < 0 || v > cap + 1e-15 * std::fmax(1.0, cap))
      throw ConfigError("jump model: weight l(e) = " + std::to_string(v) + " at atom e = " +
                        std::to_string(atoms[i]) + " violates 0 <= l <= C*min(1,|e|) with C = " +
                        std::to_string(C));
    m.l_values.push_back(v);
    m.total_intensity += intensities[i];
  }
  return m;
}

}  // namespace isaacs

#pragma once

#include <vector>

#include "isaacs/bsde.hpp"
#include "isaacs/coefficients.hpp"

namespace isaacs {

/// Finite control sets for both players.
struct ControlGrid {
  std::vector<double> U;
  std::vector<double> V;

  void validate() const {
    if (U.empty() || V.empty())
      throw ConfigError("control grid requires nonempty U and V value lists");
  }
};

struct FbsdeOptions {
  int delta0_steps = 10;     // longest window the coupled solve accepts
  double picard_tol = 1e-10;
  int picard_max = 100;
  double cfl_safety = 0.9;
};

/// Per-(step, node) control values over a window; index step*n_nodes+node.
using PolicyField = std::vector<double>;

struct WindowReport {
  BackwardSolution sol;
  int picard_iterations = 0;
  int window_splits = 0;
  double final_change = 0;
  std::vector<double> change_history;  // sup-norm change per sweep, all's windows concatenated
};

/// Coupled solve on a short window by Picard iteration: sweep m builds the
/// forward transition from the lagged fields (Y^m, Z^m) -- drift b, volatility
/// sigma, and jump shifts h evaluated there -- then runs one backward pass
/// with driver f to produce (Y^{m+1}, Z^{m+1}). Stops when the sup change
/// drops to picard_tol; a window that fails to contract is split in half
/// recursively (chained through the midpoint slice) down to single steps.
WindowReport solve_fbsde_small(const CoefficientSet& cs, const LevyModel& levy,
                               const TimeGrid& window, const SpaceGrid& space,
                               const PolicyField& u_policy, const PolicyField& v_policy,
                               const std::vector<double>& terminal, const FbsdeOptions& opt);

/// Value of the window solve at its first slice: the one-window backward
/// flow applied to `terminal`. delta_steps = 0 returns the terminal field
/// unchanged; delta_steps must not exceed opt.delta0_steps.
std::vector<double> backward_semigroup(const CoefficientSet& cs, const LevyModel& levy,
                                       const TimeGrid& time, const SpaceGrid& space, int slice,
                                       int delta_steps, const PolicyField& u_policy,
                                       const PolicyField& v_policy,
                                       const std::vector<double>& terminal,
                                       const FbsdeOptions& opt);

/// Full-horizon cost: terminal phi(x) carried backward through a chain of
/// windows of at most delta0_steps each. Policies cover the whole grid.
WindowReport cost_functional(const CoefficientSet& cs, const LevyModel& levy,
                             const TimeGrid& time, const SpaceGrid& space,
                             const PolicyField& u_policy, const PolicyField& v_policy,
                             const FbsdeOptions& opt);

}  // namespace isaacs

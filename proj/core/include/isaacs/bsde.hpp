#pragma once

#include <functional>
#include <vector>

#include "isaacs/grids.hpp"
#include "isaacs/levy.hpp"
#include "isaacs/stencil.hpp"

namespace isaacs {

/// Nodal backward solution on the full time grid. Layout is slice-major:
/// index (slice, node) = slice * n_nodes + node, slices 0..n_steps. The
/// terminal slice holds the terminal data exactly as supplied.
struct BackwardSolution {
  TimeGrid time;
  SpaceGrid space;
  int n_atoms = 0;
  std::vector<double> Y;  // [(n_steps+1) * n_nodes]
  std::vector<double> Z;  // same layout; martingale integrand
  std::vector<double> K;  // [(slice*n_nodes + node) * n_atoms + atom]
  double leakage = 0;     // boundary-clamped mass accumulated over all steps

  double y(int slice, int node) const { return Y[idx(slice, node)]; }
  double z(int slice, int node) const { return Z[idx(slice, node)]; }
  double k(int slice, int node, int atom) const { return K[idx(slice, node) * n_atoms + atom]; }
  std::size_t idx(int slice, int node) const {
    return static_cast<std::size_t>(slice) * space.n_nodes + node;
  }

  /// View of one slice of Y.
  std::vector<double> slice_y(int slice) const;
};

/// Driver callback: slice/node locate the point being solved (t = left
/// endpoint of the step), y is the unknown, z the regressed martingale
/// integrand, kbar the weighted jump pairing sum_i K_i*l(e_i)*lambda_i.
using Driver = std::function<double(int slice, int node, double y, double z, double kbar)>;

/// Supplies the transition for step slice -> slice+1, slice in
/// [0, n_steps). May return a reference to a shared cached stencil when
/// coefficients are time-independent.
using StencilProvider = std::function<const SliceStencil&(int slice)>;

/// One backward sweep:
///   Yhat_j   = E_j[Y_next]                    (stencil expectation)
///   Z_j      = cov_j(Y_next, local offset) / (vol * dt), 0 when vol = 0
///   K_{j,i}  = Y_next(x_j + shift_i) - Yhat_j (interpolated)
///   Y_j      = Yhat_j + dt * driver(...)      (fixed point, <= 50 iters,
///                                              tolerance 1e-12)
/// Divergent fixed points raise SolverError.
BackwardSolution solve_bsde(const TimeGrid& time, const SpaceGrid& space, const LevyModel& levy,
                            const std::vector<double>& terminal, const Driver& driver,
                            const StencilProvider& stencils);

/// Pointwise ordering of two solutions on a shared grid.
struct Comparison {
  bool holds = false;
  double worst_margin = 0;  // min over (slice,node) of Y_a - Y_b
};

Comparison compare_bsde(const BackwardSolution& a, const BackwardSolution& b);

/// Discrete analogue of the L2 stability estimate: exponentially weighted
/// grid averages of the solution gap against terminal gap plus driver
/// perturbation, with weight exponent beta = 2 + 2C + 4C^2 where C is the
/// recorded Lipschitz bound of the driver.
struct StabilityGap {
  double lhs = 0;
  double rhs = 0;
  double beta = 0;
  bool satisfied = false;  // lhs <= rhs * (1 + 1e-6)
};

/// `driver_diff_at_b(slice, node)` must evaluate g_a - g_b at solution b's
/// own (y, z, kbar), i.e. the perturbation the estimate integrates.
StabilityGap stability_gap(const BackwardSolution& a, const BackwardSolution& b,
                           const LevyModel& levy,
                           const std::function<double(int, int)>& driver_diff_at_b,
                           double driver_lip);

}  // namespace isaacs
